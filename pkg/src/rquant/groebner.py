"""Buchberger completion and ideal membership with cofactor certificates.

Computation happens in the free polynomial ring on the ring's variables
and ``h``; the quotient relations (``x^p`` for nil variables, ``h^N``)
are added as extra generators whose cofactors are discarded, since they
vanish in the quotient.  Order: graded lex, ``h`` last (smallest).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CharacteristicMismatch
from .polyring import Poly, PolyRing


def _key(e):
    return (sum(e), e)


def _lead(f):
    e = max(f, key=_key)
    return e, f[e]


def _add_scaled(acc, f, c, shift, p):
    """acc += c * x^shift * f  (in place)."""
    for e, v in f.items():
        m = tuple(a + b for a, b in zip(e, shift))
        nv = (acc.get(m, 0) + c * v) % p
        if nv:
            acc[m] = nv
        else:
            acc.pop(m, None)


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


@dataclass
class _Elem:
    poly: dict
    cof: list  # list of dicts, one per user generator


def _reduce(f, basis, ngens, p):
    """Full multivariate division. Returns (remainder, cofactor dicts)."""
    f = dict(f)
    rem = {}
    cof = [dict() for _ in range(ngens)]
    while f:
        e, c = _lead(f)
        for g in basis:
            ge, gc = g.lead
            if _divides(ge, e):
                shift = tuple(x - y for x, y in zip(e, ge))
                q = (c * pow(gc, -1, p)) % p
                _add_scaled(f, g.poly, -q, shift, p)
                for j, cj in enumerate(g.cof):
                    _add_scaled(cof[j], cj, q, shift, p)
                break
        else:
            rem[e] = c
            del f[e]
    return rem, cof


def buchberger(gens, relations, p):
    """Groebner basis of ``gens + relations`` tracking cofactors of ``gens``."""
    ngens = len(gens)
    elems = []
    for j, g in enumerate(gens):
        if g:
            cof = [dict() for _ in range(ngens)]
            cof[j] = {tuple(0 for _ in next(iter(g))): 1}
            elems.append(_Elem(dict(g), cof))
    for r in relations:
        elems.append(_Elem(dict(r), [dict() for _ in range(ngens)]))
    for g in elems:
        g.lead = _lead(g.poly)
    pairs = [(i, j) for j in range(len(elems)) for i in range(j)]
    while pairs:
        i, j = pairs.pop(0)
        gi, gj = elems[i], elems[j]
        (ei, ci), (ej, cj) = gi.lead, gj.lead
        lcm = _lcm(ei, ej)
        if lcm == tuple(a + b for a, b in zip(ei, ej)):
            continue  # coprime leads: S-pair reduces to zero
        s = {}
        cof = [dict() for _ in range(ngens)]
        si = tuple(a - b for a, b in zip(lcm, ei))
        sj = tuple(a - b for a, b in zip(lcm, ej))
        ai, aj = pow(ci, -1, p), pow(cj, -1, p)
        _add_scaled(s, gi.poly, ai, si, p)
        _add_scaled(s, gj.poly, -aj, sj, p)
        for k in range(ngens):
            _add_scaled(cof[k], gi.cof[k], ai, si, p)
            _add_scaled(cof[k], gj.cof[k], -aj, sj, p)
        rem, q = _reduce(s, elems, ngens, p)
        if rem:
            for k in range(ngens):
                _add_scaled(cof[k], q[k], -1, tuple(0 for _ in lcm), p)
            new = _Elem(rem, cof)
            new.lead = _lead(rem)
            elems.append(new)
            n = len(elems) - 1
            pairs.extend((m, n) for m in range(n))
    return elems


@dataclass
class IdealPresentation:
    """Ideal of a :class:`PolyRing` given by generators.

    The Groebner basis is computed lazily on first use and cached.
    """

    generators: list
    ring: PolyRing = None
    _gb: list = field(default=None, repr=False)

    def __post_init__(self):
        if self.ring is None:
            self.ring = self.generators[0].ring
        for g in self.generators:
            self.ring.check(g.ring)
        if "laurent" in self.ring.kinds:
            raise CharacteristicMismatch("ideal membership needs nil/poly variables only")

    def relations(self):
        ring = self.ring
        rels = []
        n = ring.nvars
        for i, k in enumerate(ring.kinds):
            if k == "nil":
                e = [0] * (n + 1)
                e[i] = ring.p
                rels.append({tuple(e): 1})
        e = [0] * (n + 1)
        e[n] = ring.N
        rels.append({tuple(e): 1})
        return rels

    @property
    def groebner(self):
        if self._gb is None:
            self._gb = buchberger([g.terms for g in self.generators],
                                  self.relations(), self.ring.p)
        return self._gb


@dataclass
class Membership:
    member: bool
    cofactors: list = None
    remainder: Poly = None

    def __bool__(self):
        return self.member


def ideal_membership(f: Poly, ideal: IdealPresentation) -> Membership:
    """Decide ``f in I``; on success return re-verified cofactors."""
    ring = ideal.ring
    ring.check(f.ring)
    gb = ideal.groebner
    rem, cof = _reduce(f.terms, gb, len(ideal.generators), ring.p)
    if rem:
        return Membership(False, remainder=Poly(ring, rem))
    cofactors = [Poly(ring, c) for c in cof]
    check = ring.zero()
    for q, g in zip(cofactors, ideal.generators):
        check = check + q * g
    if check != f:
        raise AssertionError("ideal membership certificate failed to re-verify")
    return Membership(True, cofactors=cofactors)
