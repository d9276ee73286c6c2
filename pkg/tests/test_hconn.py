import random

import pytest

from rquant import forms as F
from rquant import hconn as HC
from rquant.errors import IntegrabilityViolated, NotClosed
from rquant.expr import parse_form, parse_poly
from rquant.forms import DiffForm
from rquant.polyring import PolyRing
from rquant.suite import case_local_quantization, case_pcurvature_routes, example_connection, random_closed_form

B2 = PolyRing.make(3, ["x1", "x2"], "poly", N=5)
B1 = PolyRing.make(3, ["x1"], "nil", N=1)


def conn(text, ring=B2):
    return HC.HConnection(parse_form(text, ring))


def test_construction_needs_closed_form():
    with pytest.raises(NotClosed):
        conn("x2*dx1")


def test_p_curvature_examples():
    assert not HC.p_curvature(HC.HConnection.trivial(B2), 0)
    got = HC.p_curvature(example_connection(), 1)
    assert got == parse_poly("h^3*x1^9*x2^6 - h^3*x1^3", B2)
    assert not HC.p_curvature(conn("(1 - x1 + x1^2)*dx1", B1.with_N(5)), 0)


def test_route_disagreement_is_reported():
    c = HC.HConnection(parse_form("x1*dx1", B2))
    X = F.coordinate_field(B2, 0)
    with pytest.raises(IntegrabilityViolated):
        HC.p_curvature(c, X, field_p=[B2.one(), B2.zero()])


def test_p_support_examples():
    zero = HC.p_support(HC.HConnection.trivial(B2))
    assert zero.generator_strings() == ["ξ1'", "ξ2'"]
    ex = HC.p_support(example_connection())
    assert ex.generator_strings() == ["ξ1'", "ξ2' - h^3*((x1')^3*(x2')^2 - x1')"]


def test_h_weighted_alpha():
    B = PolyRing.make(3, ["x1"], "poly", N=8)
    psup = HC.p_support(conn("h*dx1", B))
    # alpha(X)^p = h^3 and the p-curvature is h^3 * h^3
    assert psup.generator_strings() == ["ξ1' - h^3*(h^3)"]


def test_extract_theta_examples():
    assert not HC.extract_theta(HC.p_support(HC.HConnection.trivial(B2)))
    theta = HC.extract_theta(HC.p_support(example_connection()))
    tw = theta.ring
    assert theta == parse_form("((x1')^3*(x2')^2 - x1')*dx2'", tw)
    S = HC.support_ring(B2)
    psup = HC.PSupportIdeal.from_kappas([tw.one(), tw.zero()], S)
    assert HC.extract_theta(psup) == parse_form("dx1'", tw)


def test_classification_examples():
    c = HC.classify_quantization(HC.HConnection.trivial(B1))
    assert c.logarithmic and c.witness.is_constant()
    c = HC.classify_quantization(conn("(1 - x1 + x1^2)*dx1", B1))
    assert c.logarithmic
    assert c.witness * parse_poly("1 + x1", B1).inverse() == c.witness.const_term() * B1.one()
    assert c.isomorphism_to_standard * c.witness == B1.one()
    c = HC.classify_quantization(conn("dx1", B1))
    assert not c.logarithmic and c.witness is None


def test_pcurvature_two_routes():
    r = case_pcurvature_routes(seed=5, count=60)
    assert r[1] == 0, r


def test_classification_matches_orbits():
    checked, failures, detail = case_local_quantization()
    assert failures == 0, detail


def test_isomorphic_connections_share_p_support():
    rng = random.Random(2)
    B = PolyRing.make(3, ["x1", "x2"], "nil", N=5)
    units = [parse_poly(t, B) for t in ["1 + x1", "2 + x1*x2", "1 - x2^2"]]
    for _ in range(20):
        a = random_closed_form(rng, B)
        g = rng.choice(units)
        c1 = HC.HConnection(a)
        c2 = HC.HConnection(a + F.dlog(g))
        assert HC.p_support(c1).generators == HC.p_support(c2).generators
        same, w = HC.isomorphic(c2, c1)
        assert same and F.dlog(w) == F.dlog(g)
