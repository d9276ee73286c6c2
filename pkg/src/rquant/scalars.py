"""Exact scalars: the prime field GF(p) and h-adically truncated series.

Polynomial rings elsewhere in the package store residues as plain ints
for speed; :class:`GfElement` is the user-facing scalar and the one the
field-axiom tests run against.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import CharacteristicMismatch, NotDivisible


@lru_cache(maxsize=None)
def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def check_characteristic(p: int) -> int:
    """Validate an odd prime characteristic and return it."""
    if not isinstance(p, int) or not is_prime(p) or p == 2:
        raise ValueError(f"characteristic must be an odd prime, got {p!r}")
    return p


@dataclass(frozen=True)
class GfElement:
    """Residue class modulo an odd prime ``p``; always stored reduced."""

    residue: int
    p: int

    def __post_init__(self):
        check_characteristic(self.p)
        object.__setattr__(self, "residue", self.residue % self.p)

    def _coerce(self, other):
        if isinstance(other, GfElement):
            if other.p != self.p:
                raise CharacteristicMismatch(f"GF({self.p}) vs GF({other.p})")
            return other.residue
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GfElement(self.residue + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GfElement(self.residue - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GfElement(o - self.residue, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GfElement(self.residue * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return GfElement(-self.residue, self.p)

    def inverse(self) -> GfElement:
        if self.residue == 0:
            raise ZeroDivisionError("0 has no inverse in GF(p)")
        return GfElement(pow(self.residue, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * GfElement(o, self.p).inverse()

    def __pow__(self, e: int):
        return gf_pow(self, e)

    def __eq__(self, other):
        if isinstance(other, GfElement):
            return self.p == other.p and self.residue == other.residue
        if isinstance(other, int):
            return self.residue == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.residue, self.p))

    def __bool__(self):
        return self.residue != 0

    def __int__(self):
        return self.residue

    def __repr__(self):
        return f"GF{self.p}({self.residue})"


def gf_pow(a: GfElement, e: int) -> GfElement:
    if e < 0:
        return gf_pow(a.inverse(), -e)
    return GfElement(pow(a.residue, e, a.p), a.p)


def _is_zero(c) -> bool:
    return not c


@dataclass(frozen=True)
class HSeries:
    """Series ``sum c_k h^k`` known modulo ``h^N``.

    Coefficients may be any ring elements supporting ``+``, ``*``,
    ``**`` and truthiness (GfElement, ints, polynomials).  ``zero`` is
    the additive identity of the coefficient ring.
    """

    coefficients: tuple
    N: int
    zero: object = 0

    def __post_init__(self):
        if self.N < 0:
            raise ValueError("truncation order must be nonnegative")
        coeffs = tuple(self.coefficients[: self.N])
        coeffs = coeffs + (self.zero,) * (self.N - len(coeffs))
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def monomial(cls, c, k: int, N: int, zero=0) -> HSeries:
        coeffs = [zero] * N
        if k < N:
            coeffs[k] = c
        return cls(tuple(coeffs), N, zero)

    def _check(self, other: HSeries):
        if not isinstance(other, HSeries):
            raise TypeError("HSeries arithmetic needs HSeries operands")
        if other.N != self.N:
            raise CharacteristicMismatch(
                f"truncation orders differ: {self.N} vs {other.N}")

    def __add__(self, other: HSeries) -> HSeries:
        self._check(other)
        return HSeries(tuple(a + b for a, b in zip(self.coefficients, other.coefficients)),
                       self.N, self.zero)

    def __sub__(self, other: HSeries) -> HSeries:
        self._check(other)
        return HSeries(tuple(a - b for a, b in zip(self.coefficients, other.coefficients)),
                       self.N, self.zero)

    def __neg__(self) -> HSeries:
        return HSeries(tuple(-a for a in self.coefficients), self.N, self.zero)

    def __mul__(self, other: HSeries) -> HSeries:
        self._check(other)
        out = [self.zero] * self.N
        for i, a in enumerate(self.coefficients):
            if _is_zero(a):
                continue
            for j in range(self.N - i):
                b = other.coefficients[j]
                if not _is_zero(b):
                    out[i + j] = out[i + j] + a * b
        return HSeries(tuple(out), self.N, self.zero)

    def valuation(self) -> int | None:
        for k, c in enumerate(self.coefficients):
            if not _is_zero(c):
                return k
        return None

    def is_zero(self) -> bool:
        return self.valuation() is None

    def __eq__(self, other):
        if not isinstance(other, HSeries) or other.N != self.N:
            return NotImplemented
        return all(_is_zero(a - b) for a, b in zip(self.coefficients, other.coefficients))

    __hash__ = None

    def __repr__(self):
        terms = [f"({c})*h^{k}" for k, c in enumerate(self.coefficients) if not _is_zero(c)]
        return f"HSeries({' + '.join(terms) or '0'} mod h^{self.N})"


def hseries_divide_exact(a: HSeries, k: int) -> HSeries:
    """Return ``b`` with ``h^k * b == a``; ``b`` is known only mod ``h^(N-k)``."""
    if k < 0 or k > a.N:
        raise ValueError(f"cannot divide by h^{k} at truncation {a.N}")
    for i in range(k):
        if not _is_zero(a.coefficients[i]):
            raise NotDivisible(f"coefficient of h^{i} is nonzero; not divisible by h^{k}")
    return HSeries(a.coefficients[k:], a.N - k, a.zero)


def frobenius_coefficientwise(a: HSeries, p: int) -> HSeries:
    # h itself is left alone: the twist acts on coefficients only.
    return HSeries(tuple(c ** p for c in a.coefficients), a.N, a.zero)
