"""Restricted symplectic geometry of the local model ``(Spec A_0, eta)``.

Sign convention: ``{f, g} = H_f(g)`` agrees with the reduction of the Weyl
bracket (``{y_i, x_i} = 1``).  With ``omega = sum dy_i ^ dx_i = d eta``
this means ``i_{H_f} omega = -df``, i.e. ``H_f(x_i) = df/dy_i`` and
``H_f(y_i) = -df/dx_i``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import forms as F
from . import linalg
from .errors import (NeedsCoverExtension, NoSolution, NotClosed, NotExact, NotSurjective,
                     UnsupportedShape, VerificationFailed)
from .forms import DiffForm
from .groebner import IdealPresentation, ideal_membership
from .polyring import Poly, PolyRing
from .weyl import (WeylAlgebra, WeylAutomorphism, WeylElement, hamiltonian_exponential,
                   p_operation)


@dataclass
class RestrictedSymplecticModel:
    """``A_0 = k[x, y]/(x^p, y^p)`` with ``eta = sum y_i dx_i``.

    ``fiber="poly"`` drops ``y^p = 0`` and gives the cotangent ring
    ``B[y]``, where graphs ``y = phi(x)`` with ``phi(0) != 0`` still cut
    out proper ideals.
    """

    p: int
    n: int
    eta: DiffForm = None
    omega: DiffForm = None
    fiber: str = "nil"

    def __post_init__(self):
        self.ring = PolyRing.make(self.p, [f"x{i + 1}" for i in range(self.n)]
                                  + [f"y{i + 1}" for i in range(self.n)],
                                  ["nil"] * self.n + [self.fiber] * self.n)
        R, n = self.ring, self.n
        if self.eta is None:
            self.eta = DiffForm(R, 1, {(i,): R.gen(n + i) for i in range(n)})
        if self.omega is None:
            self.omega = F.d(self.eta)
        if F.d(self.eta) != self.omega:
            raise ValueError("d(eta) must equal omega")
        self._W = self._omega_matrix()
        if linalg.rank(self._W, self.p) != 2 * n:
            raise ValueError("omega is degenerate")

    def _omega_matrix(self):
        m = 2 * self.n
        W = [[0] * m for _ in range(m)]
        for (a, b), f in self.omega.comps.items():
            if not f.is_constant():
                raise ValueError("only constant symplectic forms are supported")
            c = f.const_term()
            W[a][b] = c
            W[b][a] = -c % self.p
        return W

    @property
    def base_ring(self) -> PolyRing:
        """``B``: the x-coordinates alone."""
        return PolyRing.make(self.p, [f"x{i + 1}" for i in range(self.n)], "nil")

    def weyl(self, N) -> WeylAlgebra:
        return WeylAlgebra(self.p, self.n, N)


def hamiltonian_field(f: Poly, model: RestrictedSymplecticModel):
    """Vector field ``H_f`` with ``i_{H_f} omega = -df`` (see module doc)."""
    R = model.ring
    m = 2 * model.n
    p = model.p
    grad = [f.diff(i) for i in range(m)]
    # solve W^T H = -grad, W constant: invert once column by column
    Wt = [[model._W[b][a] for b in range(m)] for a in range(m)]
    comps = [R.zero() for _ in range(m)]
    for a in range(m):
        e = [0] * m
        e[a] = 1
        col = linalg.solve(Wt, e, p)
        for b in range(m):
            if col[b]:
                comps[b] = comps[b] - grad[a] * col[b]
    return comps


def poisson_bracket_A0(f: Poly, g: Poly, model) -> Poly:
    return F.apply_field(hamiltonian_field(f, model), g)


def p_operation_from_eta(f: Poly, model: RestrictedSymplecticModel) -> Poly:
    """``f^[p] = i^[p]_{H_f} eta``."""
    H = hamiltonian_field(f, model)
    return F.restricted_contract(H, model.eta, F.field_pth_power(H)).as_function()


@dataclass
class SubvarietyPresentation:
    ideal: IdealPresentation
    shape: str = "general"
    phis: list = None

    @classmethod
    def graph(cls, phis, model: RestrictedSymplecticModel):
        """Graph ``y_i = phi_i(x)``; ``phis`` live in ``model.base_ring``."""
        R, n = model.ring, model.n
        lifted = [embed_base(phi, R) for phi in phis]
        if len(lifted) != n:
            raise ValueError(f"need {n} graph functions")
        gens = [R.gen(n + i) - lifted[i] for i in range(n)]
        return cls(IdealPresentation(gens, R), "graph", list(phis))


def embed_base(phi: Poly, R: PolyRing) -> Poly:
    """``B -> A_0`` on the x-coordinates."""
    pad = R.nvars - phi.ring.nvars
    return Poly(R, {e[:-1] + (0,) * pad + (e[-1],): c for e, c in phi.terms.items()})


def graph_form(Y: SubvarietyPresentation) -> DiffForm:
    if Y.shape != "graph":
        raise UnsupportedShape("only graph presentations y_i = phi_i(x) are supported")
    return DiffForm.one_form(Y.phis)


def is_lagrangian(Y: SubvarietyPresentation, model=None) -> bool:
    return F.is_closed(graph_form(Y))


@dataclass
class RestrictedVerdict:
    restricted: bool
    via_membership: bool
    via_exactness: bool
    witness: dict = field(default_factory=dict)

    def __bool__(self):
        return self.restricted


def is_restricted_subvariety(Y: SubvarietyPresentation, model) -> RestrictedVerdict:
    """Decide ``I^[p] in I`` two ways and insist they agree.

    (a) p-operation of each generator, tested for ideal membership;
    (b) exactness of ``eta`` pulled back to the graph.
    """
    alpha = graph_form(Y)
    if not F.is_closed(alpha):
        raise NotClosed("graph is not Lagrangian: sum phi_i dx_i is not closed")
    witness = {}
    via_a = True
    for g in Y.ideal.generators:
        gp = p_operation_from_eta(g, model)
        mem = ideal_membership(gp, Y.ideal)
        if not mem:
            via_a = False
            witness["generator"] = str(g)
            witness["p_operation"] = str(gp)
            break
    try:
        prim = F.solve_primitive(alpha)
        via_b = True
        witness["primitive"] = str(prim)
    except NoSolution:
        via_b = False
        witness["cartier"] = str(F.cartier(alpha))
    if via_a != via_b:
        raise VerificationFailed(
            f"membership route says {via_a}, exactness route says {via_b} for {alpha}")
    return RestrictedVerdict(via_a, via_a, via_b, witness)


# twisted Poisson ring k[x', xi'][h]

def twisted_ring(p, n, N, hi=None) -> PolyRing:
    names = [f"x{i + 1}'" for i in range(n)] + [f"ξ{i + 1}'" for i in range(n)]
    return PolyRing.make(p, names, "poly", N=N,
                         hi=None if hi is None else [hi] * (2 * n))


def twisted_bracket(f: Poly, g: Poly) -> Poly:
    """``{xi_i', x_j'} = delta_ij``, extended as a biderivation."""
    n = f.ring.nvars // 2
    out = f.ring.zero()
    for i in range(n):
        out = out + f.diff(n + i) * g.diff(i) - f.diff(i) * g.diff(n + i)
    return out


@dataclass
class CoisotropyVerdict:
    coisotropic: bool
    pair: tuple = None
    bracket: Poly = None
    h_valuation: int = None
    unit_multiple_of_h_power: bool = False

    def __bool__(self):
        return self.coisotropic


def is_coisotropic_ideal(ideal: IdealPresentation, bracket=twisted_bracket) -> CoisotropyVerdict:
    gens = ideal.generators
    for i, j in itertools.combinations(range(len(gens)), 2):
        b = bracket(gens[i], gens[j])
        if not ideal_membership(b, ideal):
            v = b.h_valuation()
            unit = False
            if v is not None:
                try:
                    unit = b.divide_h(v).is_unit()
                except Exception:
                    unit = False
            return CoisotropyVerdict(False, (i, j), b, v, unit)
    return CoisotropyVerdict(True)


# normal form

def apply_surjection(images, u: WeylElement) -> Poly:
    """Evaluate the algebra map ``A_h -> B`` (h -> 0) on ``u``."""
    B = images[0].ring
    n = u.alg.n
    out = B.zero()
    for (a, b, k), c in u.terms.items():
        if k:
            continue
        term = B.const(c)
        for i in range(n):
            if a[i]:
                term = term * images[i] ** a[i]
            if b[i]:
                term = term * images[n + i] ** b[i]
        out = out + term
    return out


def _pairing(n, p):
    """``{gen_a, gen_b}`` on linear forms: ``{y_i, x_i} = 1``."""
    m = 2 * n
    P = [[0] * m for _ in range(m)]
    for i in range(n):
        P[n + i][i] = 1
        P[i][n + i] = p - 1
    return P


def _pair(P, u, v, p):
    return sum(u[a] * P[a][b] * v[b] for a in range(len(u)) for b in range(len(v))) % p


def _linear_element(alg, vec):
    gens = alg.generators()
    out = alg.zero()
    for c, g in zip(vec, gens):
        if c:
            out = out + g * c
    return out


@dataclass
class NormalFormResult:
    chain: list
    composite: WeylAutomorphism
    g: list
    primitive: Poly
    final_images: list
    verified: bool
    trail: list


def _frame_correction(images, alg, trail):
    n, p = alg.n, alg.p
    B = images[0].ring
    m = 2 * n
    M = [[images[col].coefficient(tuple(int(k == j) for k in range(n))) for col in range(m)]
         for j in range(n)]
    if linalg.rank(M, p) != n:
        raise NotSurjective("linear part of psi does not span n/n^2")
    K = linalg.nullspace(M, p, m)
    P = _pairing(n, p)
    for v, w in itertools.combinations(K, 2):
        if _pair(P, v, w, p):
            raise NotClosed("kernel of psi on m/(h+m^2) is not Lagrangian")
    U = [linalg.solve(M, [int(k == j) for k in range(n)], p) for j in range(n)]
    G = [[_pair(P, v, u, p) for u in U] for v in K]
    Ginv = []
    for j in range(n):
        col = linalg.solve(G, [int(k == j) for k in range(n)], p)
        if col is None:
            raise NotClosed("Lagrangian kernel is not complementary to the chosen frame")
        Ginv.append(col)
    # T = G^{-1}: row i of T is column i of the solves above, transposed
    T = [[Ginv[j][i] for j in range(n)] for i in range(n)]
    V = [[sum(T[i][k] * K[k][a] for k in range(n)) % p for a in range(m)] for i in range(n)]
    Q = [[_pair(P, U[j], U[l], p) for l in range(n)] for j in range(n)]
    half = pow(2, -1, p)
    Unew = []
    for j in range(n):
        u = list(U[j])
        for k in range(n):
            cjk = (-Q[j][k] * half) % p
            for a in range(m):
                u[a] = (u[a] + cjk * V[k][a]) % p
        Unew.append(u)
    is_identity = all(Unew[j] == [int(a == j) for a in range(m)] for j in range(n)) and \
        all(V[j] == [int(a == n + j) for a in range(m)] for j in range(n))
    S = WeylAutomorphism([_linear_element(alg, u) for u in Unew]
                         + [_linear_element(alg, v) for v in V]).verify()
    trail.append(("frame correction is symplectic", True))
    return S, is_identity


def _solve_in_coordinates(w, target: Poly):
    """Find ``g`` with ``g(w_1..w_n) = target`` in ``B``."""
    B = target.ring
    basis = B.window_basis(hmax=1)
    cols = []
    for e in basis:
        mono = Poly(B, {e: 1}).substitute(w, B)
        cols.append(mono)
    keys = basis
    rows = [[col.terms.get(k, 0) for col in cols] for k in keys]
    rhs = [target.terms.get(k, 0) for k in keys]
    x = linalg.solve(rows, rhs, B.p)
    if x is None:
        raise NotSurjective("images of x_i do not form a coordinate system on B")
    return Poly(B, {e: c for e, c in zip(basis, x) if c})


def normal_form(images, N: int) -> NormalFormResult:
    """Bring ``psi: A_h -> B`` (h -> 0) to the standard projection.

    ``images`` lists ``psi(x_1..x_n), psi(y_1..y_n)`` as elements of
    ``B = k[z]/(z^p)``.  Returns the automorphism chain; the composite
    ``theta`` satisfies ``ker(psi o theta) = J = (h, y_1..y_n)``.
    """
    B = images[0].ring
    n = B.nvars
    p = B.p
    if len(images) != 2 * n:
        raise ValueError(f"need {2 * n} images")
    alg = WeylAlgebra(p, n, N)
    trail = []
    chain = []

    # (1) constant shift: needs h^p c^p = a^p with a = eps(psi(x_i)) in R
    consts = [img.const_term() for img in images]
    for gen_idx, a in enumerate(consts):
        if a and pow(a, p, p):
            raise NeedsCoverExtension(
                f"constant term {a} of psi(generator {gen_idx}) has a^p not divisible by h^p "
                "over R = k[[h]]/h^N; an fppf extension adjoining c with h^p c^p = a^p is needed")
    trail.append(("constant terms vanish", True))
    cur = list(images)

    # (2) symplectic frame correction on m/(h+m^2)
    S, is_id = _frame_correction(cur, alg, trail)
    if not is_id:
        chain.append(("frame", S))
        cur = [apply_surjection(cur, img) for img in S.images]
    composite = S if not is_id else WeylAutomorphism.identity(alg)

    # (3) solve psi(y_i) = g_i(psi(x))
    w = cur[:n]
    gs = [_solve_in_coordinates(w, cur[n + i]) for i in range(n)]
    for g in gs:
        if any(sum(e[:-1]) < 2 for e in g.terms):
            raise VerificationFailed(f"g = {g} is not in (z)^2 after frame correction")

    # (4) alpha = sum g_i dz_i must be closed and Cartier-trivial
    alpha = DiffForm.one_form(gs)
    if not F.is_closed(alpha):
        raise NotClosed(f"alpha = {alpha} is not closed: Y is not Lagrangian")
    for i, g in enumerate(gs):
        gx = alg.from_poly(Poly(alg.commutative_ring(N), {
            e[:-1] + (0,) * n + (0,): c for e, c in g.terms.items()}))
        lhs = p_operation(alg.y(i) - gx).mod_h()
        rhs = -g.diff_n(i, p - 1)
        rhs_A0 = Poly(lhs.ring, {e[:-1] + (0,) * n + (0,): c for e, c in rhs.terms.items()})
        trail.append((f"(y{i + 1} - g{i + 1})^[p] = -d^(p-1) g{i + 1}", lhs == rhs_A0))
    C = F.cartier(alpha)
    if C:
        raise NotExact(f"C(alpha) = {C} != 0: Y is not restricted")
    try:
        f = F.solve_primitive(alpha)
    except NoSolution:
        raise NotExact(f"alpha = {alpha} has no primitive") from None
    f = f - f.const_term()
    fx = alg.from_poly(Poly(alg.commutative_ring(N), {
        e[:-1] + (0,) * n + (0,): c for e, c in f.terms.items()}))
    if fx:
        Phi = hamiltonian_exponential(fx)
        chain.append(("hamiltonian", Phi))
        cur = [apply_surjection(cur, img) for img in Phi.images]
        composite = composite.compose(Phi)

    # (5) verify kernel = J by linear algebra on A_0
    ok_y = all(not cur[n + i] for i in range(n))
    basis = [(a, b) for a in itertools.product(range(p), repeat=n)
             for b in itertools.product(range(p), repeat=n)]
    zeros = (0,) * n
    rows_keys = B.window_basis(hmax=1)
    cols = []
    for a, b in basis:
        img = apply_surjection(cur, WeylElement(alg, {(a, b, 0): 1}))
        cols.append([img.terms.get(k, 0) for k in rows_keys])
    mat = [list(r) for r in zip(*cols)]
    rk = linalg.rank(mat, p)
    y_dead = all(not any(cols[c]) for c, (a, b) in enumerate(basis) if b != zeros)
    kernel_is_J = ok_y and y_dead and rk == p ** n
    trail.append(("psi o theta kills y_i", ok_y))
    trail.append(("rank of psi o theta on A_0 is p^n", rk == p ** n))
    for label, phi in chain:
        trail.append((f"{label} automorphism certified", phi.certified))
    composite_ok = all(not apply_surjection(images, composite.images[n + i]) for i in range(n))
    trail.append(("composite maps J into ker psi", composite_ok))
    verified = kernel_is_J and composite_ok and all(ok for _, ok in trail)
    return NormalFormResult(chain, composite, gs, f, cur, verified, trail)
