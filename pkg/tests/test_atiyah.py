import itertools
import random

import pytest

from rquant import atiyah as AT
from rquant import forms as F
from rquant.errors import CocycleViolated, NotInvertible
from rquant.expr import parse_form, parse_poly
from rquant.forms import DiffForm
from rquant.suite import desk_covers, standard_model_chern, theta_flip_example

TWO = AT.CechCover(3, ["x1"], [(), (0,)], lo=(-1,), hi=(0,))
LOC2 = AT.CechCover(3, ["x1", "x2"], [(0,), (1,)], lo=(-1, -1), hi=(1, 1))
POINT = AT.CechCover(3, ["x1"], [()], base_kind="nil")


def test_zero_class_is_coboundary():
    v = AT.is_coboundary(AT.CechClass.zero(LOC2))
    assert v and not any(v.witness)


def test_one_open_gamma_class_matches_enumeration():
    cls = AT.CechClass.from_gamma(POINT, [parse_form("dx1'", POINT.twisted_ring(0))])
    v = AT.is_coboundary(cls)
    assert bool(v) == (cls in AT.coboundary_image(POINT))
    assert v and AT.coboundary(POINT, v.witness) == cls


@pytest.mark.parametrize("cover", desk_covers()[:4], ids=lambda c: f"opens={c.opens},hi={c.hi}")
def test_solver_agrees_with_enumeration(cover):
    image = AT.coboundary_image(cover)
    n = 0
    for cls in AT.enumerate_cocycles(cover):
        assert bool(AT.is_coboundary(cls)) == (cls in image)
        n += 1
    assert n > 0


def single_entry_perturbations(cover):
    for (i, j) in cover.pairs():
        R = cover.overlap_ring(i, j)
        for e in R.window_exponents():
            for k in range(cover.n):
                yield ("alpha", (i, j)), DiffForm(R, 1, {(k,): R.monomial(e)})
    for i in range(len(cover.opens)):
        T = cover.twisted_ring(i)
        for e in T.window_exponents():
            for k in range(cover.n):
                yield ("gamma", i), DiffForm(T, 1, {(k,): T.monomial(e)})


def perturb(cls, where, delta):
    alpha, gamma = dict(cls.alpha), list(cls.gamma)
    kind, key = where
    if kind == "alpha":
        alpha[key] = alpha[key] + delta
    else:
        gamma[key] = gamma[key] + delta
    return AT.CechClass(cls.cover, alpha, gamma)


def test_perturbations_break_cocycle_laws():
    z = AT.CechClass.zero(TWO)
    broken = 0
    total = 0
    for cls in itertools.islice(AT.enumerate_cocycles(TWO), 9):
        for where, delta in single_entry_perturbations(TWO):
            bad = perturb(cls, where, delta)
            # laws are linear, so the perturbed class is a cocycle iff the perturbation is
            assert bool(bad.violations()) == bool(perturb(z, where, delta).violations())
            total += 1
            if bad.violations():
                broken += 1
                with pytest.raises(CocycleViolated):
                    AT.is_coboundary(bad)
    # only dlog(x1) on the overlap survives: alpha' = C(alpha) there
    assert total - broken == 9


def test_restricted_chern_examples():
    assert not AT.restricted_chern(LOC2, AT.trivial_transitions(LOC2))
    R = TWO.overlap_ring(0, 1)
    c = AT.restricted_chern(TWO, {(0, 1): R.gen(0)})
    assert c.alpha[(0, 1)] == parse_form("x1^-1*dx1", R) and not any(c.gamma)
    t = {(0, 1): R.gen(0)}
    assert AT.restricted_chern(TWO, AT.tensor_transitions(t, t)) == c.scale(2)
    with pytest.raises(NotInvertible):
        AT.restricted_chern(TWO, {(0, 1): R.gen(0) + 1})


def test_restricted_chern_additive():
    rng = random.Random(1)
    R = LOC2.overlap_ring(0, 1)
    for _ in range(20):
        t1 = {(0, 1): R.monomial((rng.randrange(-2, 3), rng.randrange(-2, 3)), rng.randrange(1, 3))}
        t2 = {(0, 1): R.monomial((rng.randrange(-2, 3), rng.randrange(-2, 3)), rng.randrange(1, 3))}
        lhs = AT.restricted_chern(LOC2, AT.tensor_transitions(t1, t2))
        assert lhs == AT.restricted_chern(LOC2, t1) + AT.restricted_chern(LOC2, t2)


def test_chern_kernel_is_pth_powers():
    cover = AT.CechCover(3, ["x1"], [(), (0,)], lo=(-3,), hi=(3,))
    R = cover.overlap_ring(0, 1)
    for c, k in itertools.product((1, 2), range(-3, 4)):
        g = R.monomial((k,), c)
        killed = not AT.restricted_chern(cover, {(0, 1): g})
        is_cube = any((R.monomial((m,), b)) ** 3 == g for b in (1, 2) for m in range(-1, 2))
        assert killed == is_cube


def test_dual_class_examples():
    K = AT.canonical_class(LOC2)
    assert not K
    assert not AT.dual_class(AT.CechClass.zero(LOC2), K)
    R = LOC2.overlap_ring(0, 1)
    t = {(0, 1): parse_poly("x1^2*x2^-1", R)}
    c = AT.restricted_chern(LOC2, t)
    assert AT.dual_class(c, K) == AT.restricted_chern(LOC2, AT.inverse_transitions(t))
    assert AT.dual_class(AT.dual_class(c, K), K) == c


def test_split_lie_examples():
    ring = parse_form("dx1", AT.CechCover(3, ["x1", "x2"], [()], base_kind="nil").open_ring(0)).ring
    assert not AT.split_lie(DiffForm.zero(ring, 2)).correction
    beta = F.d(parse_form("x2*dx1", ring))
    res = AT.split_lie(beta)
    assert F.d(res.correction) == -beta
    assert F.is_closed(res.correction + parse_form("x2*dx1", ring))
    beta = parse_form("dx1 ∧ dx2", ring)
    assert F.d(AT.split_lie(beta).correction) == -beta


def test_cech_class_examples():
    assert not AT.cech_class(AT.RestrictedAtiyahLocalData.trivial(LOC2))
    R = LOC2.overlap_ring(0, 1)
    t = {(0, 1): parse_poly("x1*x2^-1", R)}
    zero_forms = [DiffForm.zero(LOC2.open_ring(i), 1) for i in range(2)]
    local = AT.RestrictedAtiyahLocalData(LOC2, t, zero_forms)
    assert AT.cech_class(local) == AT.restricted_chern(LOC2, t)
    single = AT.CechCover(3, ["x1"], [(0,)], lo=(-2,), hi=(2,))
    data = AT.RestrictedAtiyahLocalData(single, {}, [parse_form("x1^-1*dx1", single.open_ring(0))])
    cls = AT.cech_class(data)
    assert cls.alpha == {} and cls == AT.CechClass(single, {}, [data.p_defect(0)])


def test_opposite_data_sums_to_canonical():
    K = AT.canonical_class(LOC2)
    R = LOC2.overlap_ring(0, 1)
    t = {(0, 1): parse_poly("2*x1^-1*x2", R)}
    forms = [parse_form("x1^-1*dx1 + d(x2^2)", LOC2.open_ring(0)),
             parse_form("2*x2^-1*dx2", LOC2.open_ring(1))]
    local = AT.RestrictedAtiyahLocalData(LOC2, t, forms)
    A, Aop = AT.cech_class(local), AT.cech_class(local.opposite())
    assert AT.is_coboundary(A + Aop - K)
    assert AT.cech_class(local.opposite().opposite()) == A


def test_chern_condition_examples():
    z = AT.CechClass.zero(POINT)
    assert AT.chern_condition(z, z, z, DiffForm.zero(POINT.twisted_ring(0), 1))
    assert not theta_flip_example(-1) and theta_flip_example(1)
    verdict, parts = standard_model_chern()
    assert verdict and not any(parts[:3]) and not parts[3]
    with pytest.raises(ValueError):
        AT.chern_condition(z, z, z, DiffForm.zero(POINT.twisted_ring(0), 1), sign=0)
