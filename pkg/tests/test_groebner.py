import random

from hypothesis import given, settings, strategies as st

from rquant.expr import parse_poly
from rquant.groebner import IdealPresentation, ideal_membership
from rquant.hconn import support_ring
from rquant.polyring import PolyRing
from rquant.suite import random_poly

R = PolyRing.make(3, ["x1", "x2"])


def P(text, ring=R):
    return parse_poly(text, ring)


def check_certificate(f, ideal, m):
    total = R.zero() if ideal.ring is R else ideal.ring.zero()
    for q, g in zip(m.cofactors, ideal.generators):
        total = total + q * g
    assert total == f


def test_membership_examples():
    I = IdealPresentation([P("x1")])
    m = ideal_membership(P("x1*x2"), I)
    assert m and m.cofactors == [P("x2")]
    assert not ideal_membership(P("x1 + x2"), IdealPresentation([P("x1*x2")]))


def test_hp_not_in_support_ideal():
    base = PolyRing.make(3, ["x1", "x2"], "poly", N=5)
    S = support_ring(base)
    gens = [P("ξ1'", S), P("ξ2' - h^3*((x1')^3*(x2')^2 - x1')", S)]
    assert not ideal_membership(P("h^3", S), IdealPresentation(gens))


def test_truncation_relations_are_used():
    # x1^3 = 0 in the ring, so x1^2 * (x1 + x2) = x1^2*x2
    I = IdealPresentation([P("x1 + x2")])
    assert ideal_membership(P("x1^2*x2"), I)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_generator_order_irrelevant(seed):
    rng = random.Random(seed)
    gens = [random_poly(rng, R, terms=2) for _ in range(3)]
    gens = [g for g in gens if g] or [P("x1")]
    f = random_poly(rng, R, terms=3)
    a = IdealPresentation(list(gens))
    b = IdealPresentation(list(reversed(gens)))
    ma, mb = ideal_membership(f, a), ideal_membership(f, b)
    assert bool(ma) == bool(mb)
    if ma:
        check_certificate(f, a, ma)
        check_certificate(f, b, mb)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_combinations_are_members(seed):
    rng = random.Random(seed)
    gens = [random_poly(rng, R, terms=2) or P("x2") for _ in range(2)]
    f = sum((random_poly(rng, R) * g for g in gens), R.zero())
    I = IdealPresentation(gens)
    m = ideal_membership(f, I)
    assert m
    check_certificate(f, I, m)
