"""Rank-one h-connections ``nabla = h d + h alpha`` and their p-curvature.

The module is ``O[[h]]`` free on one generator; ``alpha`` is a closed
1-form whose coefficients may involve ``h``.  The twisted base carries
primed coordinates ``x_i'`` and the cotangent fibre coordinates ``xi_i'``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import forms as F
from .errors import IntegrabilityViolated, NoSolution, NotClosed, NotDivisible, VerificationFailed
from .forms import DiffForm
from .polyring import Poly, PolyRing


class HConnection:
    """``nabla = h d + h alpha`` on ``O[[h]]/h^N``; integrability checked on construction."""

    def __init__(self, alpha: DiffForm):
        if alpha.degree != 1:
            raise ValueError("alpha must be a 1-form")
        if not F.is_closed(alpha):
            raise NotClosed(f"d(alpha) != 0 for alpha = {alpha}")
        self.alpha = alpha
        self.base = alpha.ring

    @classmethod
    def trivial(cls, base: PolyRing) -> HConnection:
        return cls(DiffForm.zero(base, 1))

    @property
    def p(self):
        return self.base.p

    def alpha_of(self, field) -> Poly:
        """``alpha(X)`` for a vector field given by components."""
        out = self.base.zero()
        for i, c in enumerate(field):
            if c:
                out = out + self.alpha.comp(i) * c
        return out

    def apply(self, field, s: Poly) -> Poly:
        """``nabla_X s = h X(s) + h alpha(X) s``."""
        return (F.apply_field(field, s) + self.alpha_of(field) * s).mul_h(1)

    def __repr__(self):
        return f"HConnection(alpha={self.alpha})"


def _pcurv_formula(conn: HConnection, field, field_p) -> Poly:
    a = conn.alpha_of(field)
    p = conn.p
    inner = a ** p - conn.alpha_of(field_p)
    t = a
    for _ in range(p - 1):
        t = F.apply_field(field, t)
    return (inner + t).mul_h(p)


def _pcurv_operator(conn: HConnection, field, field_p, s: Poly) -> Poly:
    t = s
    for _ in range(conn.p):
        t = conn.apply(field, t)
    lower = conn.apply(field_p, s).mul_h(conn.p - 1)
    return t - lower


def test_sections(base: PolyRing):
    """Sections used to probe operators: ``1`` and every coordinate."""
    return [base.one()] + base.gens()


def p_curvature(conn: HConnection, field, field_p=None) -> Poly:
    """``nabla_X^p - h^{p-1} nabla_{X^[p]}`` as multiplication by a function.

    Computed from the closed formula and by composing the operator ``p``
    times on test sections; the two must agree.  ``field`` may be a
    coordinate index.  The result is divisible by ``h^p``.
    """
    base = conn.base
    if isinstance(field, int):
        field = F.coordinate_field(base, field)
    if field_p is None:
        field_p = F.field_pth_power(field)
    kappa = _pcurv_formula(conn, field, field_p)
    for s in test_sections(base):
        lhs = _pcurv_operator(conn, field, field_p, s)
        if lhs != kappa * s:
            raise IntegrabilityViolated(
                f"p-curvature routes disagree on section {s}: {lhs} vs {kappa * s}")
    if any(e[-1] < conn.p for e in kappa.terms):
        raise NotDivisible(f"p-curvature {kappa} is not divisible by h^{conn.p}")
    return kappa


def support_ring(base: PolyRing) -> PolyRing:
    """Twisted cotangent ring: ``x_i'`` (kinds of the base) and ``xi_i'``."""
    tw = base.twist()
    n = base.nvars
    lo = tw.lo + (0,) * n
    hi = tw.hi + (2 * base.p - 1,) * n
    return PolyRing(base.p, tw.names + tuple(f"ξ{i + 1}'" for i in range(n)),
                    tw.kinds + ("poly",) * n, base.N, lo, hi)


@dataclass
class PSupportIdeal:
    """Generators ``xi_i' - h^p kappa_i(x')`` of the p-support of a connection."""

    generators: list
    kappas: list
    ring: PolyRing
    trivial_mod_hp: bool = True

    @classmethod
    def from_kappas(cls, kappas, ring: PolyRing) -> PSupportIdeal:
        """``kappas`` live in the twisted base (first half of ``ring``)."""
        n = len(kappas)
        p = ring.p
        gens = []
        lifted = []
        for i, k in enumerate(kappas):
            kl = Poly(ring, {e[:-1] + (0,) * n + (e[-1],): c for e, c in k.terms.items()})
            lifted.append(kl)
            gens.append(ring.gen(n + i) - kl.mul_h(p))
        return cls(gens, lifted, ring, True)

    def generator_strings(self):
        n = len(self.kappas)
        out = []
        for i, k in enumerate(self.kappas):
            xi = self.ring.names[n + i]
            out.append(f"{xi} - h^{self.ring.p}*({k})" if k else xi)
        return out

    def __str__(self):
        return "(" + ", ".join(self.generator_strings()) + ")"


def p_support(conn: HConnection) -> PSupportIdeal:
    """Graph of ``p_curvature / h^p`` in the twisted cotangent ring."""
    base = conn.base
    ring = support_ring(base)
    tw = base.twist()
    kappas = []
    for i in range(base.nvars):
        kappa = p_curvature(conn, i).divide_h(conn.p).coerce(base)
        kappas.append(kappa.frobenius_root(tw))
    return PSupportIdeal.from_kappas(kappas, ring)


def extract_theta(psup: PSupportIdeal) -> DiffForm:
    """``i_theta omega' = sum kappa_i dx_i'`` at order ``h^p``, with ``omega' = sum dxi' ^ dx'``."""
    if not psup.trivial_mod_hp:
        raise ValueError("p-support deformation is not trivial modulo h^p")
    ring = psup.ring
    n = ring.nvars // 2
    tw = PolyRing(ring.p, ring.names[:n], ring.kinds[:n], ring.N, ring.lo[:n], ring.hi[:n])
    comps = {}
    for i, k in enumerate(psup.kappas):
        k0 = k.h_part(0)
        comps[(i,)] = Poly(tw, {e[:n] + (0,): c for e, c in k0.terms.items()})
    return DiffForm(tw, 1, comps)


@dataclass
class Classification:
    logarithmic: bool
    log_defect: tuple
    witness: Poly = None
    isomorphism_to_standard: Poly = None
    notes: list = field(default_factory=list)

    def __bool__(self):
        return self.logarithmic


def classify_quantization(conn: HConnection) -> Classification:
    """Decide whether ``nabla`` is isomorphic to the standard ``h d``.

    The log defect decides; when it vanishes the unit ``g`` with
    ``dlog g = alpha`` is produced and ``1 -> g^{-1} 1`` is the isomorphism.
    """
    defect = F.log_defect(conn.alpha)
    logarithmic = not any(defect)
    try:
        g = F.solve_dlog(conn.alpha)
    except NoSolution:
        g = None
    if logarithmic != (g is not None):
        raise VerificationFailed(
            f"log defect says {logarithmic} but dlog solver says {g is not None} for {conn.alpha}")
    if g is None:
        return Classification(False, defect)
    if F.dlog(g) != conn.alpha:
        raise VerificationFailed(f"dlog({g}) != alpha")
    return Classification(True, defect, g, g.inverse())


def isomorphic(a: HConnection, b: HConnection):
    """``(True, g)`` with ``alpha_a - alpha_b = dlog g``, else ``(False, None)``."""
    try:
        g = F.solve_dlog(a.alpha - b.alpha)
    except NoSolution:
        return False, None
    return True, g
