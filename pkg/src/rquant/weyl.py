"""The reduced Weyl algebra A_h over GF(p)[h]/h^N.

Generators ``x_i, y_i`` with ``[y_i, x_j] = delta_ij h`` and
``x_i^p = y_i^p = 0``.  Elements are stored normal-ordered: the key
``(a, b, k)`` stands for ``h^k x^a y^b`` with every ``x`` to the left of
every ``y``.  The Poisson bracket is ``{a, b} = (ab - ba)/h``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial

import numpy as np

from .errors import (CharacteristicMismatch, IntegrabilityViolated, NilpotencyTooDeep,
                     NotDivisible, RelationViolated)
from .polyring import Poly, PolyRing
from .scalars import check_characteristic


@dataclass(frozen=True)
class WeylAlgebra:
    p: int
    n: int
    N: int

    def __post_init__(self):
        check_characteristic(self.p)
        if self.n < 1 or self.N < 1:
            raise ValueError("need n >= 1 and N >= 1")

    @property
    def names(self):
        return tuple(f"x{i + 1}" for i in range(self.n)) + tuple(f"y{i + 1}" for i in range(self.n))

    def with_N(self, N) -> WeylAlgebra:
        return WeylAlgebra(self.p, self.n, N)

    def commutative_ring(self, N=1) -> PolyRing:
        """``A_0`` (or its h-extension): nil variables x1..xn, y1..yn."""
        return PolyRing.make(self.p, self.names, "nil", N=N)

    def zero(self):
        return WeylElement(self, {})

    def const(self, c):
        z = (0,) * self.n
        return WeylElement(self, {(z, z, 0): c})

    def one(self):
        return self.const(1)

    def h(self):
        z = (0,) * self.n
        return WeylElement(self, {(z, z, 1): 1})

    def x(self, i):
        a = tuple(int(j == i) for j in range(self.n))
        return WeylElement(self, {(a, (0,) * self.n, 0): 1})

    def y(self, i):
        b = tuple(int(j == i) for j in range(self.n))
        return WeylElement(self, {((0,) * self.n, b, 0): 1})

    def generators(self):
        return [self.x(i) for i in range(self.n)] + [self.y(i) for i in range(self.n)]

    def basis(self):
        rng = range(self.p)
        monos = list(itertools.product(rng, repeat=self.n))
        return [(a, b, k) for k in range(self.N) for a in monos for b in monos]

    def from_poly(self, f: Poly) -> WeylElement:
        """Normal-ordered lift of an element of ``A_0`` (variables x.., y..)."""
        n = self.n
        terms = {}
        for e, c in f.terms.items():
            terms[(tuple(e[:n]), tuple(e[n:2 * n]), e[-1])] = c
        return WeylElement(self, terms)


@lru_cache(maxsize=None)
def _yx(b, c, p):
    """``y^b x^c`` in one pair: list of (x exp, y exp, h power, coeff)."""
    out = []
    for k in range(min(b, c) + 1):
        coeff = comb(b, k) * comb(c, k) * factorial(k) % p
        if coeff:
            out.append((c - k, b - k, k, coeff))
    return tuple(out)


@lru_cache(maxsize=200000)
def _mono_mul(a, b, c, d, p):
    """``(x^a y^b)(x^c y^d)`` summed over pairs; list of ((a', b'), hk, coeff)."""
    per_pair = []
    for ai, bi, ci, di in zip(a, b, c, d):
        opts = []
        for xe, ye, hk, co in _yx(bi, ci, p):
            xe += ai
            ye += di
            if xe < p and ye < p:
                opts.append((xe, ye, hk, co))
        if not opts:
            return ()
        per_pair.append(opts)
    out = []
    for combo in itertools.product(*per_pair):
        xs = tuple(t[0] for t in combo)
        ys = tuple(t[1] for t in combo)
        hk = sum(t[2] for t in combo)
        co = 1
        for t in combo:
            co = co * t[3] % p
        out.append((xs, ys, hk, co))
    return tuple(out)


class WeylElement:
    __slots__ = ("alg", "terms")

    def __init__(self, alg: WeylAlgebra, terms):
        p, N = alg.p, alg.N
        self.alg = alg
        self.terms = {k: c % p for k, c in terms.items() if c % p and k[2] < N}

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.alg.const(other)
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self.alg == other.alg and self.terms == other.terms

    def __hash__(self):
        return hash((self.alg, frozenset(self.terms.items())))

    def _lift(self, other):
        if isinstance(other, int):
            return self.alg.const(other)
        if not isinstance(other, WeylElement):
            raise TypeError(f"cannot combine WeylElement with {type(other).__name__}")
        if other.alg != self.alg:
            raise CharacteristicMismatch(f"{self.alg} vs {other.alg}")
        return other

    def __add__(self, other):
        other = self._lift(other)
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0) + c
        return WeylElement(self.alg, t)

    __radd__ = __add__

    def __neg__(self):
        return WeylElement(self.alg, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return WeylElement(self.alg, {k: c * other for k, c in self.terms.items()})
        return weyl_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not defined")
        out = self.alg.one()
        for _ in range(k):
            out = out * self
        return out

    def scalar_part(self) -> int:
        z = (0,) * self.alg.n
        return self.terms.get((z, z, 0), 0)

    def divide_h(self, k: int) -> WeylElement:
        """Exact division by ``h^k``; lands in the algebra truncated at ``N - k``."""
        if any(key[2] < k for key in self.terms):
            raise NotDivisible(f"element not divisible by h^{k}")
        alg = self.alg.with_N(self.alg.N - k)
        return WeylElement(alg, {(a, b, hk - k): c for (a, b, hk), c in self.terms.items()})

    def truncate(self, N: int) -> WeylElement:
        return WeylElement(self.alg.with_N(N), self.terms)

    def mod_h(self) -> Poly:
        """Reduction modulo h as an element of the commutative ``A_0``."""
        ring = self.alg.commutative_ring()
        return Poly(ring, {a + b + (0,): c for (a, b, k), c in self.terms.items() if k == 0})

    def to_poly(self) -> Poly:
        """Same normal-ordered coefficients in ``A_0[h]/h^N`` (not a ring map)."""
        ring = self.alg.commutative_ring(self.alg.N)
        return Poly(ring, {a + b + (k,): c for (a, b, k), c in self.terms.items()})

    def y_degree(self) -> int:
        return max((sum(b) for (a, b, k) in self.terms), default=-1)

    def __str__(self):
        from .expr import format_terms
        alg = self.alg
        items = sorted(((a + b, k, c) for (a, b, k), c in self.terms.items()),
                       key=lambda t: (sum(t[0]), t[0], -t[1]), reverse=True)
        return format_terms(items, alg.names, alg.p)

    def __repr__(self):
        return f"WeylElement({self})"


def weyl_mul(u: WeylElement, v: WeylElement) -> WeylElement:
    u._lift(v)
    alg = u.alg
    p, N = alg.p, alg.N
    t = {}
    for (a, b, k1), c1 in u.terms.items():
        for (c, d, k2), c2 in v.terms.items():
            if k1 + k2 >= N:
                continue
            for xs, ys, hk, co in _mono_mul(a, b, c, d, p):
                hh = k1 + k2 + hk
                if hh < N:
                    key = (xs, ys, hh)
                    t[key] = (t.get(key, 0) + c1 * c2 * co) % p
    return WeylElement(alg, t)


def commutator(u, v):
    return u * v - v * u


def _lift(u: WeylElement, extra: int) -> WeylElement:
    return WeylElement(u.alg.with_N(u.alg.N + extra), u.terms)


def poisson_bracket(u: WeylElement, v: WeylElement) -> WeylElement:
    """``{u, v} = (uv - vu)/h``.

    Operands are read as exact representatives; the commutator is formed
    one h-order higher so the quotient is exact modulo ``h^N``.  The
    bracket is well defined on ``A_h/h^N`` because ``h^N A_h`` is a Lie
    ideal.
    """
    u._lift(v)
    return commutator(_lift(u, 1), _lift(v, 1)).divide_h(1)


def p_operation(a: WeylElement) -> WeylElement:
    """``(a^p - c^p)/h^{p-1}`` with ``c`` the scalar part of ``a``.

    Computed at truncation ``N + p - 1`` so the result is exact mod ``h^N``.
    """
    alg = a.alg
    p = alg.p
    if alg.N < p:
        raise ValueError(f"p-operation needs N >= p (N={alg.N}, p={p})")
    big = _lift(a, p - 1)
    c = a.scalar_part()
    return (big ** p - big.alg.const(pow(c, p, p))).divide_h(p - 1)


def universal_P(a: WeylElement, b: WeylElement) -> WeylElement:
    p = a.alg.p
    if a.alg.N < p:
        raise ValueError(f"universal_P needs N >= p (N={a.alg.N}, p={p})")
    A, B = _lift(a, p - 1), _lift(b, p - 1)
    return ((A * B) ** p - A ** p * B ** p).divide_h(p - 1)


def ad_power(f: WeylElement, g: WeylElement, k: int) -> WeylElement:
    out = g
    for _ in range(k):
        out = poisson_bracket(f, out)
    return out


def jacobson_sum(a: WeylElement, b: WeylElement) -> WeylElement:
    """Classical ``sum_i s_i(a, b)``: ``i s_i`` is the ``t^{i-1}`` coefficient
    of ``ad(t a + b)^{p-1}(a)``, with the Poisson bracket as Lie bracket."""
    p = a.alg.p
    coeffs = {0: a}
    for _ in range(p - 1):
        new = {}
        for j, v in coeffs.items():
            new[j] = new.get(j, a.alg.zero()) + poisson_bracket(b, v)
            new[j + 1] = new.get(j + 1, a.alg.zero()) + poisson_bracket(a, v)
        coeffs = new
    out = a.alg.zero()
    for i in range(1, p):
        out = out + coeffs.get(i - 1, a.alg.zero()) * pow(i, -1, p)
    return out


def jacobson_L(a: WeylElement, b: WeylElement) -> WeylElement:
    """Additivity defect of the p-operation, cross-checked two ways."""
    defect = p_operation(a + b) - p_operation(a) - p_operation(b)
    classical = jacobson_sum(a, b)
    if defect != classical:
        raise IntegrabilityViolated(
            f"Jacobson defect {defect} disagrees with classical sum {classical}")
    return defect


# left regular representation: the independent oracle for products

def _index(alg):
    return {key: i for i, key in enumerate(alg.basis())}


def generator_matrices(alg: WeylAlgebra):
    """Matrices of left multiplication by ``x_i``, ``y_i``, ``h``.

    Built directly from ``y x^a = x^a y + a h x^{a-1}``, not from
    :func:`weyl_mul`.
    """
    idx = _index(alg)
    dim = len(idx)
    p, n, N = alg.p, alg.n, alg.N
    H = np.zeros((dim, dim), dtype=np.int64)
    X = [np.zeros((dim, dim), dtype=np.int64) for _ in range(n)]
    Y = [np.zeros((dim, dim), dtype=np.int64) for _ in range(n)]
    for (a, b, k), col in idx.items():
        if k + 1 < N:
            H[idx[(a, b, k + 1)], col] = 1
        for i in range(n):
            if a[i] + 1 < p:
                a2 = a[:i] + (a[i] + 1,) + a[i + 1:]
                X[i][idx[(a2, b, k)], col] = 1
            if b[i] + 1 < p:
                b2 = b[:i] + (b[i] + 1,) + b[i + 1:]
                Y[i][idx[(a, b2, k)], col] += 1
            if a[i] and k + 1 < N:
                a2 = a[:i] + (a[i] - 1,) + a[i + 1:]
                Y[i][idx[(a2, b, k + 1)], col] += a[i]
    return X, Y, H


def _matpow(M, k, p):
    out = np.eye(M.shape[0], dtype=np.int64)
    for _ in range(k):
        out = (out @ M) % p
    return out


def regular_matrix(u: WeylElement, mats=None):
    alg = u.alg
    p = alg.p
    X, Y, H = generator_matrices(alg) if mats is None else mats
    dim = H.shape[0]
    out = np.zeros((dim, dim), dtype=np.int64)
    for (a, b, k), c in u.terms.items():
        M = _matpow(H, k, p)
        for i in range(alg.n):
            M = (M @ _matpow(X[i], a[i], p)) % p
        for i in range(alg.n):
            M = (M @ _matpow(Y[i], b[i], p)) % p
        out = (out + c * M) % p
    return out


def element_from_vector(alg, vec):
    basis = alg.basis()
    return WeylElement(alg, {basis[i]: int(v) for i, v in enumerate(vec) if v})


def matrix_product_oracle(u: WeylElement, v: WeylElement, mats=None) -> WeylElement:
    """``u * v`` computed as ``M(u) M(v)`` applied to the unit vector of 1."""
    alg = u.alg
    mats = generator_matrices(alg) if mats is None else mats
    Mu = regular_matrix(u, mats)
    Mv = regular_matrix(v, mats)
    idx = _index(alg)
    e1 = np.zeros(len(idx), dtype=np.int64)
    e1[idx[((0,) * alg.n, (0,) * alg.n, 0)]] = 1
    return element_from_vector(alg, (Mu @ ((Mv @ e1) % alg.p)) % alg.p)


# automorphisms

@dataclass
class WeylAutomorphism:
    """Algebra map given by images of ``x_1..x_n, y_1..y_n``; h is fixed."""

    images: list
    certified: bool = False

    @property
    def alg(self):
        return self.images[0].alg

    @classmethod
    def identity(cls, alg):
        return cls(alg.generators(), certified=True)

    def apply(self, u: WeylElement) -> WeylElement:
        alg = u.alg
        n = alg.n
        out = alg.zero()
        h = alg.h()
        for (a, b, k), c in u.terms.items():
            term = alg.const(c)
            for i in range(n):
                if a[i]:
                    term = term * self.images[i] ** a[i]
            for i in range(n):
                if b[i]:
                    term = term * self.images[n + i] ** b[i]
            if k:
                term = term * h ** k
            out = out + term
        return out

    def compose(self, inner: WeylAutomorphism) -> WeylAutomorphism:
        """``self o inner``: apply ``inner`` first."""
        return WeylAutomorphism([self.apply(g) for g in inner.images], certified=False)

    def verify(self) -> WeylAutomorphism:
        violations = relation_violations(self.images)
        if violations:
            raise RelationViolated("; ".join(violations))
        self.certified = True
        return self


def relation_violations(images):
    """Names of defining relations of ``A_h`` that the images break."""
    alg = images[0].alg
    n, p = alg.n, alg.p
    xs, ys = images[:n], images[n:]
    h = alg.h()
    bad = []
    for i in range(n):
        if xs[i] ** p:
            bad.append(f"x{i + 1}^p != 0")
        if ys[i] ** p:
            bad.append(f"y{i + 1}^p != 0")
        for j in range(n):
            if i < j and commutator(xs[i], xs[j]):
                bad.append(f"[x{i + 1},x{j + 1}] != 0")
            if i < j and commutator(ys[i], ys[j]):
                bad.append(f"[y{i + 1},y{j + 1}] != 0")
            target = h if i == j else alg.zero()
            if commutator(ys[i], xs[j]) != target:
                bad.append(f"[y{i + 1},x{j + 1}] != {'h' if i == j else 0}")
    return bad


def hamiltonian_exponential(f: WeylElement) -> WeylAutomorphism:
    """Truncated exponential ``a -> sum_{k<p} D^k(a)/k!`` of ``D = {f, -}``.

    Needs ``f`` in the square of the ideal of the x's and ``D^p`` to kill
    every generator; otherwise the divided-power regime would be needed
    and :class:`NilpotencyTooDeep` is raised.
    """
    alg = f.alg
    p = alg.p
    for (a, b, k), c in f.terms.items():
        if sum(a) < 2:
            raise ValueError(f"{f} is not in the square of the ideal (x_1..x_n)")

    def D(u):
        return poisson_bracket(f, u)

    images = []
    for g in alg.generators():
        total = g
        term = g
        for k in range(1, p):
            term = D(term) * pow(k, -1, p)
            total = total + term
        if D(term):
            raise NilpotencyTooDeep(f"D^{p} does not vanish on generator {g}")
        images.append(total)
    return WeylAutomorphism(images).verify()
