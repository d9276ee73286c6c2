"""Cech classes of restricted Atiyah algebras.

The two-term complex is ``closed 1-forms -> twisted 1-forms`` with
differential ``alpha -> alpha' - C(alpha)``.  A 1-cochain is a pair
``({alpha_ij}, {gamma_i})``; a coboundary is ``alpha_ij = beta_i - beta_j``,
``gamma_i = beta_i' - C(beta_i)``.

Covers are finite diagrams of localizations of one coordinate ring: every
open uses the same variables and inverts some of them, so restriction
maps are inclusions of Laurent windows.  Windows keep all cochain spaces
finite, which makes every question here exact linear algebra over GF(p).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import forms as F
from . import linalg
from .errors import CocycleViolated, NotInvertible, NotLocallyExact, NotPthPower
from .forms import DiffForm
from .polyring import Poly, PolyRing


@dataclass(frozen=True)
class CechCover:
    """Opens of ``Spec k[x_1..x_n]`` (or of a nil base) given by inverted coordinates.

    ``opens[i]`` lists the coordinates inverted on ``U_i``.  ``lo``/``hi``
    bound the exponent window per coordinate; ``lo`` only matters where
    the coordinate is inverted.
    """

    p: int
    names: tuple
    opens: tuple
    lo: tuple = None
    hi: tuple = None
    base_kind: str = "poly"

    def __post_init__(self):
        n = len(self.names)
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "opens", tuple(tuple(sorted(set(o))) for o in self.opens))
        if self.lo is None:
            object.__setattr__(self, "lo", (-1,) * n)
        if self.hi is None:
            object.__setattr__(self, "hi", (self.p - 1,) * n)
        object.__setattr__(self, "lo", tuple(self.lo))
        object.__setattr__(self, "hi", tuple(self.hi))
        if not self.opens:
            raise ValueError("a cover needs at least one open")
        if self.base_kind == "nil" and any(self.opens):
            raise ValueError("nilpotent coordinates cannot be inverted")

    @property
    def n(self):
        return len(self.names)

    def ring(self, inverted) -> PolyRing:
        inv = set(inverted)
        kinds, lo, hi = [], [], []
        for v in range(self.n):
            if v in inv:
                kinds.append("laurent")
                lo.append(self.lo[v])
            else:
                kinds.append(self.base_kind)
                lo.append(0)
            hi.append(min(self.hi[v], self.p - 1) if self.base_kind == "nil" else self.hi[v])
        return PolyRing.make(self.p, self.names, kinds, 1, lo, hi)

    def open_ring(self, i) -> PolyRing:
        return self.ring(self.opens[i])

    def overlap_ring(self, *idx) -> PolyRing:
        return self.ring(set().union(*(self.opens[i] for i in idx)))

    def twisted_ring(self, i) -> PolyRing:
        return self.open_ring(i).twist()

    def pairs(self):
        return list(itertools.combinations(range(len(self.opens)), 2))

    def triples(self):
        return list(itertools.combinations(range(len(self.opens)), 3))


def restrict(form: DiffForm, ring: PolyRing) -> DiffForm:
    return form.map_coefficients(lambda f: f.coerce(ring), ring)


def _twisted_overlap(cover, i, j):
    return cover.overlap_ring(i, j).twist()


@dataclass
class CechClass:
    """Cochain ``({alpha_ij}_{i<j}, {gamma_i})`` stored in reduced form."""

    cover: CechCover
    alpha: dict
    gamma: list

    @classmethod
    def zero(cls, cover: CechCover) -> CechClass:
        return cls(cover,
                   {(i, j): DiffForm.zero(cover.overlap_ring(i, j), 1) for i, j in cover.pairs()},
                   [DiffForm.zero(cover.twisted_ring(i), 1) for i in range(len(cover.opens))])

    @classmethod
    def from_gamma(cls, cover: CechCover, gammas) -> CechClass:
        """``{0, gamma}``: a class carried by its twisted component alone."""
        z = cls.zero(cover)
        return cls(cover, z.alpha, [restrict(g, cover.twisted_ring(i))
                                    for i, g in enumerate(gammas)])

    def a(self, i, j) -> DiffForm:
        """``alpha_ij`` for any ordered pair (antisymmetric)."""
        if i == j:
            return DiffForm.zero(self.cover.overlap_ring(i), 1)
        return self.alpha[(i, j)] if i < j else -self.alpha[(j, i)]

    def _combine(self, other, fn) -> CechClass:
        if other.cover != self.cover:
            raise CocycleViolated("classes live on different covers")
        return CechClass(self.cover,
                         {k: fn(v, other.alpha[k]) for k, v in self.alpha.items()},
                         [fn(g, h) for g, h in zip(self.gamma, other.gamma)])

    def __add__(self, other):
        return self._combine(other, lambda u, v: u + v)

    def __sub__(self, other):
        return self._combine(other, lambda u, v: u - v)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c: int) -> CechClass:
        return CechClass(self.cover, {k: v.scale(c) for k, v in self.alpha.items()},
                         [g.scale(c) for g in self.gamma])

    def __eq__(self, other):
        if not isinstance(other, CechClass):
            return NotImplemented
        return (self.cover == other.cover and self.alpha == other.alpha
                and self.gamma == other.gamma)

    def __hash__(self):
        return hash((self.cover, tuple(sorted(self.alpha.items(), key=lambda kv: kv[0])),
                     tuple(self.gamma)))

    def __bool__(self):
        return any(self.alpha.values()) or any(self.gamma)

    def violations(self):
        """List of broken cocycle laws (empty for a cocycle)."""
        cover = self.cover
        out = []
        for (i, j), a in self.alpha.items():
            if not F.is_closed(a):
                out.append(f"alpha_{i}{j} is not closed")
                continue
            tw = _twisted_overlap(cover, i, j)
            lhs = restrict(self.gamma[i], tw) - restrict(self.gamma[j], tw)
            rhs = a.rename(tw) - F.cartier(a, tw)
            if lhs != rhs:
                out.append(f"gamma_{i} - gamma_{j} != alpha_{i}{j}' - C(alpha_{i}{j})")
        for i, j, k in cover.triples():
            R = cover.overlap_ring(i, j, k)
            if restrict(self.a(i, j), R) + restrict(self.a(j, k), R) != restrict(self.a(i, k), R):
                out.append(f"alpha_{i}{j} + alpha_{j}{k} != alpha_{i}{k}")
        return out

    def verify(self) -> CechClass:
        bad = self.violations()
        if bad:
            raise CocycleViolated("; ".join(bad))
        return self

    def to_json(self):
        return {"alpha": {f"{i},{j}": str(v) for (i, j), v in sorted(self.alpha.items())},
                "gamma": [str(g) for g in self.gamma]}


# coboundary map on a finite window

def _cartier_monomial(ring: PolyRing, e, k):
    """Cartier image of ``x^e dx_k`` by the component formula, unchecked.

    Returns ``(coefficient, exponent, is_root)``; ``is_root`` is false when
    the image is not a p-th power (which cannot happen on closed forms).
    """
    p = ring.p
    c = 1
    a = e[k]
    for step in range(p - 1):
        c = c * (a - step) % p
    if not c:
        return 0, None, False
    e2 = list(e)
    e2[k] -= p - 1
    c = -c % p
    if any(x % p for x in e2):
        return c, tuple(e2), False
    return c, tuple(x // p for x in e2), True


def _unknowns(cover: CechCover):
    out = []
    for i in range(len(cover.opens)):
        R = cover.open_ring(i)
        for e in R.window_exponents():
            for k in range(cover.n):
                out.append((i, e, k))
    return out


def _delta_column(cover: CechCover, unknown):
    """Image of the basis cochain ``x^e dx_k`` on ``U_i`` as a sparse dict.

    Keys: ("d", i, pair, e) closedness; ("a", i, j, k, e) for ``beta_i - beta_j``;
    ("g", i, k, e) for ``beta' - C(beta)``; ("np", i, k, e) for the
    non-p-th-power residue of the Cartier formula.
    """
    i, e, k = unknown
    R = cover.open_ring(i)
    p = cover.p
    col = {}

    def put(key, c):
        c = (col.get(key, 0) + c) % p
        if c:
            col[key] = c
        else:
            col.pop(key, None)

    # d(x^e dx_k) = sum_j e_j x^{e - 1_j} dx_j ^ dx_k
    for j in range(cover.n):
        if j == k or not e[j] % p:
            continue
        e2 = list(e)
        e2[j] -= 1
        pair, sign = ((j, k), 1) if j < k else ((k, j), -1)
        put(("d", i, pair, tuple(e2)), sign * e[j])
    for a, b in cover.pairs():
        if i == a:
            put(("a", a, b, k, e), 1)
        elif i == b:
            put(("a", a, b, k, e), -1)
    put(("g", i, k, e), 1)
    c, e2, is_root = _cartier_monomial(R, e, k)
    if c:
        put(("g" if is_root else "np", i, k, e2), -c)
    return col


def _cochain_vector(cls: CechClass):
    vec = {}
    for (i, j), a in cls.alpha.items():
        for (k,), f in a.comps.items():
            for e, c in f.terms.items():
                vec[("a", i, j, k, e[:-1])] = c
    for i, g in enumerate(cls.gamma):
        for (k,), f in g.comps.items():
            for e, c in f.terms.items():
                vec[("g", i, k, e[:-1])] = c
    return vec


def _beta_from_vector(cover, unknowns, x):
    betas = []
    for i in range(len(cover.opens)):
        R = cover.open_ring(i)
        comps = {}
        for (oi, e, k), c in zip(unknowns, x):
            if oi == i and c:
                comps.setdefault((k,), {})[e + (0,)] = c
        betas.append(DiffForm(R, 1, {idx: Poly(R, t) for idx, t in comps.items()}))
    return betas


def coboundary(cover: CechCover, betas) -> CechClass:
    """``delta(beta) = ({beta_i - beta_j}, {beta_i' - C(beta_i)})`` using the checked Cartier."""
    alpha = {}
    for i, j in cover.pairs():
        R = cover.overlap_ring(i, j)
        alpha[(i, j)] = restrict(betas[i], R) - restrict(betas[j], R)
    gamma = []
    for i, b in enumerate(betas):
        tw = cover.twisted_ring(i)
        gamma.append(b.rename(tw) - F.cartier(b, tw))
    return CechClass(cover, alpha, gamma)


@dataclass
class CoboundaryVerdict:
    coboundary: bool
    witness: list = None

    def __bool__(self):
        return self.coboundary


def is_coboundary(cls: CechClass) -> CoboundaryVerdict:
    """Solve ``delta(beta) = cls`` for closed ``beta_i`` in the cover's window."""
    cls.verify()
    cover = cls.cover
    unknowns = _unknowns(cover)
    cols = [_delta_column(cover, u) for u in unknowns]
    target = _cochain_vector(cls)
    keys = sorted(set().union(*cols, target) if cols else set(target), key=repr)
    kidx = {key: r for r, key in enumerate(keys)}
    rows = [[0] * len(unknowns) for _ in keys]
    for c, col in enumerate(cols):
        for key, v in col.items():
            rows[kidx[key]][c] = v
    rhs = [target.get(key, 0) for key in keys]
    if not unknowns:
        return CoboundaryVerdict(not any(rhs), [])
    x = linalg.solve(rows, rhs, cover.p)
    if x is None:
        return CoboundaryVerdict(False)
    betas = _beta_from_vector(cover, unknowns, x)
    if coboundary(cover, betas) != cls:
        raise CocycleViolated("coboundary witness failed to re-verify")
    return CoboundaryVerdict(True, betas)


def enumerate_window_forms(ring: PolyRing, n):
    """Every 1-form with coefficients in the window of ``ring`` (GF(p)^dim many)."""
    exps = ring.window_exponents()
    slots = [(e, k) for e in exps for k in range(n)]
    for coeffs in itertools.product(range(ring.p), repeat=len(slots)):
        comps = {}
        for (e, k), c in zip(slots, coeffs):
            if c:
                comps.setdefault((k,), {})[e + (0,)] = c
        yield DiffForm(ring, 1, {idx: Poly(ring, t) for idx, t in comps.items()})


def cochain_space_size(cover: CechCover) -> int:
    dims = [len(cover.overlap_ring(i, j).window_exponents()) * cover.n for i, j in cover.pairs()]
    dims += [len(cover.open_ring(i).window_exponents()) * cover.n
             for i in range(len(cover.opens))]
    return cover.p ** sum(dims)


def enumerate_cocycles(cover: CechCover):
    """All cocycles in the cochain window (exhaustive; keep the space tiny)."""
    pairs = cover.pairs()
    alpha_spaces = [list(enumerate_window_forms(cover.overlap_ring(i, j), cover.n))
                    for i, j in pairs]
    gamma_spaces = [list(enumerate_window_forms(cover.twisted_ring(i), cover.n))
                    for i in range(len(cover.opens))]
    for alphas in itertools.product(*alpha_spaces):
        if not all(F.is_closed(a) for a in alphas):
            continue
        for gammas in itertools.product(*gamma_spaces):
            cls = CechClass(cover, dict(zip(pairs, alphas)), list(gammas))
            if not cls.violations():
                yield cls


def coboundary_image(cover: CechCover):
    """Set of all ``delta(beta)`` over closed ``beta`` in the window, by enumeration."""
    spaces = []
    for i in range(len(cover.opens)):
        spaces.append([b for b in enumerate_window_forms(cover.open_ring(i), cover.n)
                       if F.is_closed(b)])
    image = set()
    for betas in itertools.product(*spaces):
        image.add(coboundary(cover, list(betas)))
    return image


# line bundles and local Atiyah data

def _check_units(cover, transitions):
    for (i, j), g in transitions.items():
        if not g.is_unit():
            raise NotInvertible(f"g_{i}{j} = {g} is not a unit on U_{i} n U_{j}")
    for i, j, k in cover.triples():
        R = cover.overlap_ring(i, j, k)
        lhs = transitions[(i, j)].coerce(R) * transitions[(j, k)].coerce(R)
        if lhs != transitions[(i, k)].coerce(R):
            raise CocycleViolated(f"g_{i}{j} g_{j}{k} != g_{i}{k}")


def restricted_chern(cover: CechCover, transitions) -> CechClass:
    """``c_r(L) = {dlog g_ij, 0}`` for a unit cocycle ``g_ij`` (keys ``i < j``)."""
    _check_units(cover, transitions)
    z = CechClass.zero(cover)
    alpha = {(i, j): F.dlog(transitions[(i, j)]) for i, j in cover.pairs()}
    return CechClass(cover, alpha, z.gamma).verify()


def tensor_transitions(t1, t2):
    return {k: t1[k] * t2[k] for k in t1}


def inverse_transitions(t):
    return {k: g.inverse() for k, g in t.items()}


def trivial_transitions(cover: CechCover):
    return {(i, j): cover.overlap_ring(i, j).one() for i, j in cover.pairs()}


def dual_class(cls: CechClass, canonical: CechClass) -> CechClass:
    """``[A^op] = c_r(K) - [A]``."""
    return canonical - cls


@dataclass
class SplitResult:
    correction: DiffForm
    flat: bool
    cartier_of_curvature: DiffForm


def split_lie(beta: DiffForm) -> SplitResult:
    """Find ``alpha`` with ``d alpha = -beta`` after certifying ``C(beta) = 0``.

    On a 2-dimensional base ``C(beta)`` for a coordinate pair is computed
    two ways: the component formula and the restricted contraction of the
    coordinate field, which must agree.
    """
    ring = beta.ring
    if beta.degree != 2:
        raise ValueError("curvature must be a 2-form")
    if not F.is_closed(beta):
        raise NotLocallyExact(f"curvature {beta} is not closed")
    try:
        cb = F.cartier(beta)
    except NotPthPower as exc:
        raise NotLocallyExact(str(exc)) from None
    tw = ring.twist()
    for i in range(ring.nvars):
        contracted = F.restricted_contract(F.coordinate_field(ring, i), beta)
        lhs = F.cartier(contracted, tw) if F.is_closed(contracted) else None
        rhs = F.contract(F.coordinate_field(tw, i), cb)
        if lhs is not None and lhs != rhs:
            raise NotLocallyExact(f"Cartier identity fails for coordinate {i}: {lhs} vs {rhs}")
    if cb:
        raise NotLocallyExact(f"C(beta) = {cb} != 0")
    alpha = _solve_two_form_primitive(beta)
    if F.d(alpha) != -beta:
        raise NotLocallyExact("primitive failed to re-verify")
    return SplitResult(alpha, True, cb)


def _solve_two_form_primitive(beta: DiffForm) -> DiffForm:
    """Linear solve for ``alpha`` with ``d alpha = -beta``; lowest-index pivots."""
    ring = beta.ring
    n = ring.nvars
    if not beta:
        return DiffForm.zero(ring, 1)
    lo, hi = F._exponent_window(beta.comps.values(), ring)
    basis = [(e, k) for e in ring.window_basis(lo, hi) for k in range(n)]
    cols = []
    for e, k in basis:
        cols.append(F.d(DiffForm(ring, 1, {(k,): Poly(ring, {e: 1})})).comps)
    target = {(idx, e): c for idx, f in (-beta).comps.items() for e, c in f.terms.items()}
    keys = set(target)
    for col in cols:
        for idx, f in col.items():
            keys.update((idx, e) for e in f.terms)
    keys = sorted(keys)
    kidx = {key: r for r, key in enumerate(keys)}
    rows = [[0] * len(basis) for _ in keys]
    for c, col in enumerate(cols):
        for idx, f in col.items():
            for e, v in f.terms.items():
                rows[kidx[(idx, e)]][c] = v
    rhs = [target.get(key, 0) for key in keys]
    x = linalg.solve(rows, rhs, ring.p)
    if x is None:
        raise NotLocallyExact(f"no alpha with d alpha = -({beta}) in the window")
    comps = {}
    for (e, k), c in zip(basis, x):
        if c:
            comps.setdefault((k,), {})[e] = c
    return DiffForm(ring, 1, {idx: Poly(ring, t) for idx, t in comps.items()})


@dataclass
class RestrictedAtiyahLocalData:
    """Line-bundle-type local data: ``sigma_i(d) = d + A_i(d)`` twisted by ``tau_i``.

    ``transitions[(i, j)]`` are unit gluings, ``forms[i]`` the connection
    forms ``A_i`` and ``twists[i]`` optional twisted 1-forms added to the
    p-defect (a change of restricted structure).
    """

    cover: CechCover
    transitions: dict
    forms: list
    twists: list = None
    corrections: list = field(default_factory=list)

    @classmethod
    def trivial(cls, cover: CechCover) -> RestrictedAtiyahLocalData:
        return cls(cover, trivial_transitions(cover),
                   [DiffForm.zero(cover.open_ring(i), 1) for i in range(len(cover.opens))])

    def opposite(self) -> RestrictedAtiyahLocalData:
        """Data of ``A^op``: inverse gluings, negated connection and twist."""
        tw = None if self.twists is None else [-t for t in self.twists]
        return RestrictedAtiyahLocalData(self.cover, inverse_transitions(self.transitions),
                                         [-a for a in self.forms], tw)

    def curvatures(self):
        return [F.d(a) for a in self.forms]

    def flatten(self) -> RestrictedAtiyahLocalData:
        """Apply :func:`split_lie` on every open."""
        new_forms, corr = [], []
        for a in self.forms:
            res = split_lie(F.d(a))
            new_forms.append(a + res.correction)
            corr.append(res.correction)
        return RestrictedAtiyahLocalData(self.cover, self.transitions, new_forms,
                                         self.twists, corr)

    def p_defect(self, i) -> DiffForm:
        """``gamma_i`` with ``gamma_i(d_k)^p = sigma(d_k)^[p] - sigma(d_k^[p])``.

        The defect is ``A_k^p + d_k^{p-1} A_k`` (the rank-one p-curvature);
        its p-th root is taken coefficientwise in the twisted variables.
        """
        cover = self.cover
        A = self.forms[i]
        R = cover.open_ring(i)
        tw = cover.twisted_ring(i)
        p = cover.p
        comps = {}
        for k in range(cover.n):
            ak = A.comp(k)
            defect = ak ** p + ak.diff_n(k, p - 1)
            comps[(k,)] = defect.frobenius_root(tw)
        gamma = DiffForm(tw, 1, comps)
        if gamma != A.rename(tw) - F.cartier(A, tw):
            raise CocycleViolated(f"p-defect on U_{i} disagrees with A' - C(A)")
        if self.twists is not None:
            gamma = gamma + restrict(self.twists[i], tw)
        return gamma


def cech_class(local: RestrictedAtiyahLocalData) -> CechClass:
    """``alpha_ij = A_i - A_j + dlog g_ij``, ``gamma_i`` from the p-defect."""
    cover = local.cover
    for i, a in enumerate(local.forms):
        if F.d(a):
            raise NotLocallyExact(f"splitting on U_{i} is not flat; run flatten() first")
    _check_units(cover, local.transitions)
    alpha = {}
    for i, j in cover.pairs():
        R = cover.overlap_ring(i, j)
        alpha[(i, j)] = (restrict(local.forms[i], R) - restrict(local.forms[j], R)
                         + F.dlog(local.transitions[(i, j)].coerce(R)))
    gamma = [local.p_defect(i) for i in range(len(cover.opens))]
    return CechClass(cover, alpha, gamma).verify()


def canonical_class(cover: CechCover) -> CechClass:
    """``c_r(K)`` from the Jacobians of the (identical) coordinate systems: zero."""
    jac = {(i, j): cover.overlap_ring(i, j).one() for i, j in cover.pairs()}
    return restricted_chern(cover, jac)


@dataclass
class ChernVerdict:
    holds: bool
    difference: CechClass
    witness: list = None

    def __bool__(self):
        return self.holds


def chern_condition(cL: CechClass, rho: CechClass, cK: CechClass, theta_form: DiffForm,
                    sign: int = -1) -> ChernVerdict:
    """Test ``c_r(L) = rho + 1/2 c_r(K) + sign [i_theta omega']`` up to coboundary."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    cover = cL.cover
    p = cover.p
    half = pow(2, -1, p)
    theta_cls = CechClass.from_gamma(cover, [theta_form] * len(cover.opens))
    diff = cL - rho - cK.scale(half) - theta_cls.scale(sign)
    verdict = is_coboundary(diff)
    return ChernVerdict(verdict.coboundary, diff, verdict.witness)
