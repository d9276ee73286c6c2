"""Differential forms of degree <= 2 over a :class:`PolyRing`.

Vector fields are plain sequences of ``Poly`` components, one per
coordinate.  Every ring variable is a coordinate; ``h`` is a parameter
and has no differential.
"""

from __future__ import annotations

import itertools

from . import linalg
from .errors import NoSolution, NotClosed, NotPthPower
from .polyring import Poly, PolyRing, from_vector


def _sort_sign(idx):
    """Sort an index tuple; return (sorted, sign) or (None, 0) on repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return None, 0
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return tuple(idx), sign


class DiffForm:
    """Homogeneous form ``sum f_I dx_I`` with sorted index tuples ``I``."""

    __slots__ = ("ring", "degree", "comps")

    def __init__(self, ring: PolyRing, degree: int, comps=None):
        if degree not in (0, 1, 2):
            raise ValueError("only forms of degree 0, 1, 2 are supported")
        self.ring = ring
        self.degree = degree
        clean = {}
        for idx, f in (comps or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError(f"index {idx} does not match degree {degree}")
            s, sign = _sort_sign(idx)
            if s is None or not f:
                continue
            ring.check(f.ring)
            clean[s] = clean.get(s, ring.zero()) + f * sign
        self.comps = {k: v for k, v in clean.items() if v}

    @classmethod
    def function(cls, f: Poly) -> DiffForm:
        return cls(f.ring, 0, {(): f})

    @classmethod
    def one_form(cls, coeffs) -> DiffForm:
        coeffs = list(coeffs)
        return cls(coeffs[0].ring, 1, {(i,): c for i, c in enumerate(coeffs)})

    @classmethod
    def zero(cls, ring, degree) -> DiffForm:
        return cls(ring, degree, {})

    @classmethod
    def dx(cls, ring, i) -> DiffForm:
        return cls(ring, 1, {(i,): ring.one()})

    def comp(self, *idx) -> Poly:
        return self.comps.get(tuple(idx), self.ring.zero())

    def coefficients(self):
        """Component list of a 1-form, indexed by coordinate."""
        if self.degree != 1:
            raise ValueError("coefficients() is for 1-forms")
        return [self.comp(i) for i in range(self.ring.nvars)]

    def as_function(self) -> Poly:
        if self.degree != 0:
            raise ValueError("not a 0-form")
        return self.comp()

    def __bool__(self):
        return bool(self.comps)

    def __eq__(self, other):
        if not isinstance(other, DiffForm):
            return NotImplemented
        if not self.comps and not other.comps:
            return self.ring == other.ring
        return (self.ring == other.ring and self.degree == other.degree
                and self.comps == other.comps)

    def __hash__(self):
        return hash((self.ring, self.degree, frozenset(self.comps.items())))

    def _same(self, other):
        if other.degree != self.degree:
            raise ValueError(f"degree mismatch {self.degree} vs {other.degree}")
        self.ring.check(other.ring)

    def __add__(self, other):
        if not isinstance(other, DiffForm):
            return NotImplemented
        self._same(other)
        comps = dict(self.comps)
        for k, v in other.comps.items():
            comps[k] = comps.get(k, self.ring.zero()) + v
        return DiffForm(self.ring, self.degree, comps)

    def __neg__(self):
        return DiffForm(self.ring, self.degree, {k: -v for k, v in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f) -> DiffForm:
        return DiffForm(self.ring, self.degree, {k: v * f for k, v in self.comps.items()})

    def __mul__(self, other):
        if isinstance(other, DiffForm):
            return self.wedge(other)
        return self.scale(other)

    __rmul__ = scale

    def wedge(self, other: DiffForm) -> DiffForm:
        self.ring.check(other.ring)
        deg = self.degree + other.degree
        if deg > 2:
            raise ValueError("forms of degree > 2 are not supported")
        comps = {}
        for i1, f1 in self.comps.items():
            for i2, f2 in other.comps.items():
                s, sign = _sort_sign(i1 + i2)
                if s is None:
                    continue
                comps[s] = comps.get(s, self.ring.zero()) + f1 * f2 * sign
        return DiffForm(self.ring, deg, comps)

    def map_coefficients(self, fn, ring=None) -> DiffForm:
        ring = self.ring if ring is None else ring
        return DiffForm(ring, self.degree, {k: fn(v) for k, v in self.comps.items()})

    def rename(self, ring: PolyRing) -> DiffForm:
        """The twisted copy ``alpha'`` (residues fixed since k = GF(p))."""
        return self.map_coefficients(lambda f: f.rename(ring), ring)

    def h_part(self, k) -> DiffForm:
        return self.map_coefficients(lambda f: f.h_part(k))

    def __str__(self):
        from .expr import format_form
        return format_form(self)

    def __repr__(self):
        return f"DiffForm<{self.degree}>({self})"


# de Rham calculus

def d(form: DiffForm) -> DiffForm:
    ring = form.ring
    if form.degree >= 2:
        raise ValueError("d is only implemented up to degree 1 -> 2")
    comps = {}
    for idx, f in form.comps.items():
        for j in range(ring.nvars):
            fj = f.diff(j)
            if not fj:
                continue
            s, sign = _sort_sign((j,) + idx)
            if s is None:
                continue
            comps[s] = comps.get(s, ring.zero()) + fj * sign
    return DiffForm(ring, form.degree + 1, comps)


def is_closed(form: DiffForm) -> bool:
    if form.degree == 2 and form.ring.nvars <= 2:
        return True
    return not d(form)


def apply_field(field, f: Poly) -> Poly:
    out = f.ring.zero()
    for i, c in enumerate(field):
        if c:
            out = out + c * f.diff(i)
    return out


def field_power(field, k: int):
    """Components of the operator power ``X^k`` on coordinates."""
    ring = field[0].ring
    comps = []
    for i in range(ring.nvars):
        g = ring.gen(i)
        for _ in range(k):
            g = apply_field(field, g)
        comps.append(g)
    return comps


def field_pth_power(field):
    """``X^[p]``: in characteristic p the p-th power of a derivation is one."""
    return field_power(field, field[0].ring.p)


def coordinate_field(ring: PolyRing, i: int):
    return [ring.one() if j == i else ring.zero() for j in range(ring.nvars)]


def contract(field, form: DiffForm) -> DiffForm:
    if form.degree < 1:
        raise ValueError("cannot contract a 0-form")
    ring = form.ring
    comps = {}
    for idx, f in form.comps.items():
        for pos, j in enumerate(idx):
            if not field[j]:
                continue
            rest = idx[:pos] + idx[pos + 1:]
            sign = -1 if pos % 2 else 1
            comps[rest] = comps.get(rest, ring.zero()) + f * field[j] * sign
    return DiffForm(ring, form.degree - 1, comps)


def lie_derivative(field, form: DiffForm) -> DiffForm:
    """Direct formula: differentiate coefficients, and ``L_X dx_i = d(X_i)``."""
    ring = form.ring
    out = DiffForm.zero(ring, form.degree)
    dX = [d(DiffForm.function(c)) for c in field]
    for idx, f in form.comps.items():
        out = out + DiffForm(ring, form.degree, {idx: apply_field(field, f)})
        for pos in range(len(idx)):
            piece = DiffForm.function(f)
            for q, j in enumerate(idx):
                piece = piece.wedge(dX[j] if q == pos else DiffForm.dx(ring, j))
            out = out + piece
    return out


def restricted_contract(field, form: DiffForm, field_p_power=None) -> DiffForm:
    """``i_{X^[p]} alpha - L_X^{p-1} i_X alpha``."""
    if field_p_power is None:
        field_p_power = field_pth_power(field)
    p = form.ring.p
    term = contract(field, form)
    for _ in range(p - 1):
        term = lie_derivative(field, term)
    return contract(field_p_power, form) - term


# Cartier-type operators

def cartier(form: DiffForm, target: PolyRing = None) -> DiffForm:
    """Cartier operator on closed forms, by the component formula.

    Degree 1: ``c_i^(p) = -d_i^{p-1} f_i``.  Degree 2:
    ``c_12^(p) = d_1^{p-1} d_2^{p-1} f_12``.  Degree 0: p-th root.
    """
    ring = form.ring
    target = ring.twist() if target is None else target
    p = ring.p
    if form.degree == 0:
        f = form.as_function()
        if any(f.diff(i) for i in range(ring.nvars)):
            raise NotClosed("function is not a p-th power (df != 0)")
        return DiffForm.function(f.frobenius_root(target))
    if not is_closed(form):
        raise NotClosed(f"d({form}) != 0")
    comps = {}
    for idx, f in form.comps.items():
        g = f
        for i in idx:
            g = -g.diff_n(i, p - 1)
        try:
            comps[idx] = g.frobenius_root(target)
        except NotPthPower as exc:
            raise NotPthPower(f"Cartier component {idx}: {exc}") from None
    return DiffForm(target, form.degree, comps)


def log_defect(form: DiffForm):
    """Tuple ``(alpha_i^p + d_i^{p-1} alpha_i)_i``; all zero iff logarithmic."""
    if form.degree != 1:
        raise ValueError("log_defect takes a 1-form")
    if not is_closed(form):
        raise NotClosed(f"d({form}) != 0")
    p = form.ring.p
    return tuple(f ** p + f.diff_n(i, p - 1) for i, f in enumerate(form.coefficients()))


def _exponent_window(polys, ring: PolyRing, pad: int = 1):
    """Per-variable exponent range covering ``polys`` and ``pad`` steps above."""
    lo, hi = [], []
    for i, k in enumerate(ring.kinds):
        exps = [e[i] for f in polys for e in f.terms]
        a = min(exps, default=0)
        b = max(exps, default=0) + pad
        if k == "nil":
            a, b = 0, ring.p - 1
        elif k == "poly":
            a = 0
        else:
            a, b = min(a, 0), max(b, 0)
        lo.append(a)
        hi.append(b)
    return lo, hi


def _linear_system(basis, image_fn, ring, target_basis=None):
    """Columns are ``image_fn(monomial)`` flattened over a common key set."""
    images = [image_fn(Poly(ring, {e: 1})) for e in basis]
    keys = set()
    for img in images:
        for idx, f in img.items():
            for e in f.terms:
                keys.add((idx, e))
    if target_basis:
        keys |= set(target_basis)
    keys = sorted(keys)
    kidx = {k: r for r, k in enumerate(keys)}
    rows = [[0] * len(basis) for _ in keys]
    for col, img in enumerate(images):
        for idx, f in img.items():
            for e, c in f.terms.items():
                rows[kidx[(idx, e)]][col] = c
    return rows, keys, kidx


def solve_primitive(form: DiffForm) -> Poly:
    """Find ``f`` with ``df = alpha`` by exact linear algebra over GF(p).

    Raises :class:`NoSolution` when none exists in the natural monomial
    window (one degree above the data, nil variables capped at p-1).
    """
    if form.degree != 1:
        raise ValueError("solve_primitive takes a 1-form")
    if not is_closed(form):
        raise NotClosed(f"d({form}) != 0")
    ring = form.ring
    lo, hi = _exponent_window(form.comps.values(), ring)
    basis = [e for e in ring.window_basis(lo, hi) if any(e[:-1])]
    tkeys = [(idx, e) for idx, f in form.comps.items() for e in f.terms]
    rows, keys, kidx = _linear_system(
        basis, lambda m: {k: v for k, v in d(DiffForm.function(m)).comps.items()}, ring, tkeys)
    rhs = [0] * len(keys)
    for idx, f in form.comps.items():
        for e, c in f.terms.items():
            rhs[kidx[(idx, e)]] = c
    x = linalg.solve(rows, rhs, ring.p) if basis else None
    if x is None:
        if not form:
            return ring.zero()
        raise NoSolution(f"{form} is not exact")
    return from_vector(ring, basis, x)


def _dlog_with_constant_term(form: DiffForm, lo, hi):
    ring = form.ring
    basis = ring.window_basis(lo, hi)
    one_key = (0,) * ring.nvars + (0,)
    if one_key not in basis:
        return None

    def image(m):
        out = d(DiffForm.function(m)) - form.scale(m)
        return dict(out.comps)

    rows, keys, _ = _linear_system(basis, image, ring)
    null = linalg.nullspace(rows, ring.p, len(basis))
    col = basis.index(one_key)
    for v in null:
        if v[col]:
            g = from_vector(ring, basis, v)
            return g * pow(g.const_term(), -1, ring.p)
    return None


def solve_dlog(form: DiffForm) -> Poly:
    """Find a unit ``g`` with ``dg = g * alpha``.

    The unknown ``g`` is searched as ``m * u`` where ``m`` runs over Laurent
    monomials in the inverted coordinates' window and ``u`` has constant
    term 1.
    """
    if form.degree != 1:
        raise ValueError("solve_dlog takes a 1-form")
    if not is_closed(form):
        raise NotClosed(f"d({form}) != 0")
    ring = form.ring
    if not form:
        return ring.one()
    lo, hi = _exponent_window(form.comps.values(), ring)
    laurent = [i for i, k in enumerate(ring.kinds) if k == "laurent"]
    shifts = sorted(itertools.product(*[range(ring.lo[i], ring.hi[i] + 1) for i in laurent]),
                    key=lambda s: (sum(map(abs, s)), s))
    for shift in shifts:
        mono_e = [0] * ring.nvars
        for i, s in zip(laurent, shift):
            mono_e[i] = s
        m = ring.monomial(mono_e)
        shifted = form - dlog(m) if any(shift) else form
        u = _dlog_with_constant_term(shifted, lo, hi)
        if u is not None:
            return m * u
    raise NoSolution(f"{form} is not logarithmic")


def dlog(g: Poly) -> DiffForm:
    ring = g.ring
    inv = g.inverse()
    return DiffForm(ring, 1, {(i,): g.diff(i) * inv for i in range(ring.nvars)})


def pth_root_function(f: Poly, target=None) -> Poly:
    return f.frobenius_root(target)
