import random

import pytest
from hypothesis import given, settings, strategies as st

from rquant.errors import ParseError
from rquant.expr import format_form, format_poly, parse_form, parse_one_form, parse_poly, parse_weyl
from rquant.polyring import PolyRing
from rquant.suite import random_poly, random_weyl
from rquant.weyl import WeylAlgebra

R = PolyRing.make(5, ["x1", "x2", "y1", "y2"], N=3)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_poly_round_trip(seed):
    f = random_poly(random.Random(seed), R, terms=5, hmax=3)
    text = format_poly(f)
    assert parse_poly(text, R) == f
    assert format_poly(parse_poly(text, R)) == text


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_form_round_trip(seed):
    rng = random.Random(seed)
    a = parse_form("dx1", R) * random_poly(rng, R) + parse_form("dy2", R) * random_poly(rng, R)
    b = parse_form("dx1 ∧ dy1", R) * random_poly(rng, R)
    assert parse_form(format_form(b), R) == b
    assert parse_form(format_form(a), R) == a


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_weyl_round_trip(seed):
    alg = WeylAlgebra(3, 2, 5)
    u = random_weyl(random.Random(seed), alg, terms=4)
    assert parse_weyl(str(u), alg) == u


def test_syntax_variants():
    assert parse_poly("2 x1 x2", R) == parse_poly("2*x1*x2", R)
    assert parse_poly("−x1", R) == parse_poly("-x1", R)
    assert parse_form("d(x1*x2)", R) == parse_form("x2*dx1 + x1*dx2", R)
    assert parse_form("dx1 & dx2", R) == -parse_form("dx2 wedge dx1", R)


def test_weyl_keeps_written_order():
    alg = WeylAlgebra(3, 1, 5)
    assert parse_weyl("y1*x1", alg) - parse_weyl("x1*y1", alg) == alg.h()


@pytest.mark.parametrize("text,pos", [("x1 + ", 5), ("x1 $ x2", 3), ("(x1", 3), ("x9", 0)])
def test_parse_errors_report_position(text, pos):
    with pytest.raises(ParseError) as err:
        parse_poly(text, R)
    assert err.value.position == pos


def test_one_form_guard():
    assert parse_one_form("0", R).degree == 1
    with pytest.raises(ParseError):
        parse_one_form("x1", R)
