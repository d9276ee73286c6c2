import itertools

import pytest
from hypothesis import given, strategies as st

from rquant.errors import CharacteristicMismatch, NotDivisible
from rquant.polyring import PolyRing
from rquant.scalars import GfElement, HSeries, frobenius_coefficientwise, gf_pow, hseries_divide_exact


def gf(a, p):
    return GfElement(a, p)


@pytest.mark.parametrize("a,e,p,want", [(2, 3, 3, 2), (0, 5, 5, 0), (2, 4, 5, 1)])
def test_gf_pow_examples(a, e, p, want):
    assert gf_pow(gf(a, p), e) == gf(want, p)


@pytest.mark.parametrize("p", [3, 5])
def test_field_axioms_exhaustive(p):
    els = [gf(a, p) for a in range(p)]
    zero, one = gf(0, p), gf(1, p)
    for a, b, c in itertools.product(els, repeat=3):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
    for a in els:
        assert a + zero == a and a * one == a
        assert a + (-a) == zero
        if a:
            assert a * a.inverse() == one
        assert gf_pow(a, p) == a


@pytest.mark.parametrize("p", [2, 4, 9, 1])
def test_bad_characteristic(p):
    with pytest.raises(ValueError):
        GfElement(1, p)


def test_mixed_characteristic():
    with pytest.raises(CharacteristicMismatch):
        gf(1, 3) + gf(1, 5)


def test_divide_exact_examples():
    N = 6
    b = hseries_divide_exact(HSeries.monomial(1, 2, N), 2)
    assert b.N == N - 2 and b == HSeries.monomial(1, 0, N - 2)
    with pytest.raises(NotDivisible):
        hseries_divide_exact(HSeries((1, 1), N), 1)
    a = HSeries((gf(0, 5),) * 3 + (gf(3, 5), gf(1, 5)), N, gf(0, 5))
    assert hseries_divide_exact(a, 3) == HSeries((gf(3, 5), gf(1, 5)), 3, gf(0, 5))


@given(st.lists(st.integers(0, 4), min_size=1, max_size=7), st.integers(0, 6))
def test_divide_round_trip(coeffs, k):
    N = 7
    z = gf(0, 5)
    a = HSeries(tuple(gf(c, 5) for c in coeffs), N, z)
    shifted = HSeries.monomial(gf(1, 5), k, N, z) * a
    back = hseries_divide_exact(shifted, k)
    assert back == HSeries(a.coefficients[: N - k], N - k, z)


def test_frobenius_examples():
    z = gf(0, 3)
    a = HSeries((gf(1, 3), gf(2, 3)), 4, z)
    assert frobenius_coefficientwise(a, 3) == a
    R = PolyRing.make(3, ["x"])
    x = R.gen(0)
    assert frobenius_coefficientwise(HSeries((x,), 2, R.zero()), 3) == HSeries((R.zero(),), 2, R.zero())
    got = frobenius_coefficientwise(HSeries((R.one() + x,), 2, R.zero()), 3)
    assert got == HSeries((R.one(),), 2, R.zero())


def test_frobenius_is_ring_hom_exhaustive():
    R = PolyRing.make(3, ["x"])
    polys = [R.const(a) + R.const(b) * R.gen(0) + R.const(c) * R.gen(0) ** 2
             for a, b, c in itertools.product(range(3), repeat=3)]
    series = [HSeries((f, g), 2, R.zero()) for f, g in itertools.product(polys[:9], polys[::3])]
    F = lambda s: frobenius_coefficientwise(s, 3)
    for s in series[:20]:
        for t in series[::7]:
            assert F(s + t) == F(s) + F(t)
    for f, g in itertools.product(polys, repeat=2):
        assert (f * g) ** 3 == f ** 3 * g ** 3
        assert (f + g) ** 3 == f ** 3 + g ** 3
