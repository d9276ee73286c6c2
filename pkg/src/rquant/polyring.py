"""Commutative polynomial rings over GF(p) with an optional h-parameter.

A ring is a list of coordinate variables, each of one of three kinds:

``nil``
    ``x^p = 0`` (Frobenius neighbourhoods such as ``B`` and ``A_0``);
``poly``
    ordinary polynomial variable;
``laurent``
    inverted coordinate, negative exponents allowed.

plus the parameter ``h`` truncated at ``h^N`` (``N = 1`` means no ``h``).
Elements are stored as ``{exponent tuple: residue}`` where the last slot
of the exponent tuple is the power of ``h``.

Windows (``lo``/``hi`` per variable) never affect arithmetic.  They only
describe the finite monomial bases used when a computation needs a
finite-dimensional cochain space.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import CharacteristicMismatch, NotDivisible, NotInvertible, NotPthPower
from .scalars import check_characteristic

KINDS = ("nil", "poly", "laurent")


@dataclass(frozen=True)
class PolyRing:
    p: int
    names: tuple
    kinds: tuple
    N: int = 1
    lo: tuple = None
    hi: tuple = None

    def __post_init__(self):
        check_characteristic(self.p)
        n = len(self.names)
        if len(self.kinds) != n:
            raise ValueError("one kind per variable")
        for k in self.kinds:
            if k not in KINDS:
                raise ValueError(f"unknown variable kind {k!r}")
        if self.N < 1:
            raise ValueError("N must be at least 1")
        if self.lo is None:
            object.__setattr__(self, "lo", tuple(
                -(self.p - 1) if k == "laurent" else 0 for k in self.kinds))
        if self.hi is None:
            object.__setattr__(self, "hi", tuple(
                self.p - 1 if k == "nil" else 2 * self.p - 1 for k in self.kinds))

    @classmethod
    def make(cls, p, names, kind="nil", N=1, lo=None, hi=None):
        names = tuple(names)
        kinds = tuple(kind for _ in names) if isinstance(kind, str) else tuple(kind)
        return cls(p, names, kinds, N,
                   None if lo is None else tuple(lo), None if hi is None else tuple(hi))

    @property
    def nvars(self) -> int:
        return len(self.names)

    def with_N(self, N: int) -> PolyRing:
        return PolyRing(self.p, self.names, self.kinds, N, self.lo, self.hi)

    def with_kinds(self, kinds, lo=None, hi=None) -> PolyRing:
        return PolyRing(self.p, self.names, tuple(kinds), self.N,
                        None if lo is None else tuple(lo), None if hi is None else tuple(hi))

    def twist(self) -> PolyRing:
        """Frobenius-twisted copy: same shape, primed variable names."""
        return PolyRing(self.p, tuple(name + "'" for name in self.names), self.kinds,
                        self.N, self.lo, self.hi)

    def index(self, name: str) -> int:
        return self.names.index(name)

    # element constructors
    def zero(self) -> Poly:
        return Poly(self, {})

    def one(self) -> Poly:
        return self.const(1)

    def const(self, c: int) -> Poly:
        return self.monomial((0,) * self.nvars, c)

    def monomial(self, exps, c=1, hpow=0) -> Poly:
        return Poly(self, {tuple(exps) + (hpow,): c})

    def gen(self, i) -> Poly:
        if isinstance(i, str):
            i = self.index(i)
        e = [0] * self.nvars
        e[i] = 1
        return self.monomial(e)

    def gens(self):
        return [self.gen(i) for i in range(self.nvars)]

    def h(self) -> Poly:
        return self.monomial((0,) * self.nvars, 1, 1)

    def window_exponents(self, lo=None, hi=None):
        """All coordinate exponent vectors inside the declared window."""
        lo = self.lo if lo is None else lo
        hi = self.hi if hi is None else hi
        ranges = []
        for k, a, b in zip(self.kinds, lo, hi):
            if k == "nil":
                a, b = max(a, 0), min(b, self.p - 1)
            elif k == "poly":
                a = max(a, 0)
            ranges.append(range(a, b + 1))
        return list(itertools.product(*ranges))

    def window_basis(self, lo=None, hi=None, hmax=None):
        """Monomial keys (with h power) spanning the window."""
        hmax = self.N if hmax is None else min(hmax, self.N)
        return [e + (k,) for k in range(hmax) for e in self.window_exponents(lo, hi)]

    def check(self, other: PolyRing):
        if other != self:
            raise CharacteristicMismatch(f"ring mismatch: {self} vs {other}")

    def __str__(self):
        vs = ",".join(f"{n}:{k}" for n, k in zip(self.names, self.kinds))
        return f"GF({self.p})[{vs}; h mod h^{self.N}]"


class Poly:
    """Immutable element of a :class:`PolyRing`."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms):
        p = ring.p
        nil = [i for i, k in enumerate(ring.kinds) if k == "nil"]
        clean = {}
        for e, c in terms.items():
            c %= p
            if not c or e[-1] >= ring.N or any(e[i] >= p for i in nil):
                continue
            clean[e] = c
        self.ring = ring
        self.terms = clean

    # basic protocol
    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def _lift(self, other) -> Poly:
        if isinstance(other, Poly):
            self.ring.check(other.ring)
            return other
        if isinstance(other, int):
            return self.ring.const(other)
        raise TypeError(f"cannot combine Poly with {type(other).__name__}")

    def __add__(self, other):
        other = self._lift(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return Poly(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return Poly(self.ring, {e: c * other for e, c in self.terms.items()})
        other = self._lift(other)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return Poly(self.ring, t)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Poly:
        if k < 0:
            return self.inverse() ** (-k)
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, int):
            return self * pow(other, -1, self.ring.p)
        return self * self._lift(other).inverse()

    # inspection
    def coefficient(self, exps, hpow=0) -> int:
        return self.terms.get(tuple(exps) + (hpow,), 0)

    def const_term(self) -> int:
        return self.coefficient((0,) * self.ring.nvars)

    def h_part(self, k: int) -> Poly:
        """Coefficient of ``h^k`` as an h-free element of the same ring."""
        return Poly(self.ring, {e[:-1] + (0,): c for e, c in self.terms.items() if e[-1] == k})

    def h_valuation(self):
        return min((e[-1] for e in self.terms), default=None)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def degree(self) -> int:
        return max((sum(e[:-1]) for e in self.terms), default=-1)

    # calculus
    def diff(self, i: int) -> Poly:
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                t[tuple(e2)] = c * e[i]
        return Poly(self.ring, t)

    def diff_n(self, i: int, k: int) -> Poly:
        out = self
        for _ in range(k):
            out = out.diff(i)
        return out

    def divide_h(self, k: int) -> Poly:
        """Exact division by ``h^k``; result lives at truncation ``N - k``."""
        if any(e[-1] < k for e in self.terms):
            raise NotDivisible(f"element not divisible by h^{k}")
        ring = self.ring.with_N(self.ring.N - k)
        return Poly(ring, {e[:-1] + (e[-1] - k,): c for e, c in self.terms.items()})

    def mul_h(self, k: int) -> Poly:
        return Poly(self.ring, {e[:-1] + (e[-1] + k,): c for e, c in self.terms.items()})

    def coerce(self, ring: PolyRing) -> Poly:
        """Reinterpret in a ring with the same variables (e.g. other N or kinds)."""
        if ring.names != self.ring.names:
            raise CharacteristicMismatch("variable names differ")
        return Poly(ring, self.terms)

    # units
    def _split_unit(self):
        """Write ``self = c * m * (1 + n)`` with ``m`` a Laurent monomial and ``n`` nilpotent."""
        ring = self.ring
        nil_idx = [i for i, k in enumerate(ring.kinds) if k == "nil"]
        lead = {e: c for e, c in self.terms.items()
                if e[-1] == 0 and all(e[i] == 0 for i in nil_idx)}
        if len(lead) != 1:
            raise NotInvertible(f"{self} is not a unit")
        (e, c), = lead.items()
        for i, k in enumerate(ring.kinds):
            if k == "poly" and e[i] != 0:
                raise NotInvertible(f"{self} is not a unit")
        return c, e

    def is_unit(self) -> bool:
        try:
            self._split_unit()
        except NotInvertible:
            return False
        return True

    def inverse(self) -> Poly:
        c, e = self._split_unit()
        ring = self.ring
        m_inv = Poly(ring, {tuple(-a for a in e[:-1]) + (0,): pow(c, -1, ring.p)})
        nilpart = self * m_inv - 1
        # nilpart is nilpotent: nil variables and h bound its order
        bound = ring.N + sum(ring.p for k in ring.kinds if k == "nil")
        total = ring.one()
        power = ring.one()
        for _ in range(bound):
            power = power * (-nilpart)
            if not power:
                break
            total = total + power
        else:
            raise NotInvertible(f"{self}: correction term is not nilpotent")
        return total * m_inv

    # Frobenius
    def frobenius_root(self, target: PolyRing = None) -> Poly:
        """Inverse of the twist embedding: ``x^{pa} h^k -> (x')^a h^k``."""
        ring = self.ring
        target = ring.twist() if target is None else target
        p = ring.p
        t = {}
        for e, c in self.terms.items():
            if any(a % p for a in e[:-1]):
                raise NotPthPower(f"{self} is not a p-th power in twisted variables")
            t[tuple(a // p for a in e[:-1]) + (e[-1],)] = c
        return Poly(target, t)

    def frobenius_embed(self, target: PolyRing) -> Poly:
        """Twist embedding ``(x')^a -> x^{pa}``; h and residues untouched."""
        p = self.ring.p
        return Poly(target, {tuple(a * p for a in e[:-1]) + (e[-1],): c
                             for e, c in self.terms.items()})

    def rename(self, ring: PolyRing) -> Poly:
        """Same exponents, different variable names (``alpha -> alpha'``)."""
        if ring.nvars != self.ring.nvars:
            raise CharacteristicMismatch("variable counts differ")
        return Poly(ring, self.terms)

    def substitute(self, images, ring: PolyRing = None) -> Poly:
        """Ring map sending variable ``i`` to ``images[i]`` (h fixed)."""
        ring = images[0].ring if ring is None else ring
        out = ring.zero()
        hgen = ring.h()
        cache = {}
        for e, c in self.terms.items():
            term = ring.const(c)
            for i, a in enumerate(e[:-1]):
                if a:
                    key = (i, a)
                    if key not in cache:
                        cache[key] = images[i] ** a
                    term = term * cache[key]
            if e[-1]:
                term = term * hgen ** e[-1]
            out = out + term
        return out

    def vector(self, basis_index) -> list:
        v = [0] * len(basis_index)
        for e, c in self.terms.items():
            if e not in basis_index:
                raise ValueError(f"monomial {e} outside basis window")
            v[basis_index[e]] = c
        return v

    def sorted_terms(self):
        # graded-lex, h last and smallest
        return sorted(self.terms.items(),
                      key=lambda ec: (sum(ec[0][:-1]), ec[0][:-1], -ec[0][-1]), reverse=True)

    def __str__(self):
        from .expr import format_poly
        return format_poly(self)

    def __repr__(self):
        return f"Poly({self})"


def from_vector(ring: PolyRing, basis, vec) -> Poly:
    return Poly(ring, {e: c for e, c in zip(basis, vec) if c})
