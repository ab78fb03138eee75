import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mlfrac.core import INF, Ball, ExponentVector, ParamSet, SigmaMask
from mlfrac.quadrature import NonIntegrableTail, QuadSpec
from mlfrac.weights import (RegionViolation, Weight, WeightPair, ball_family, classify_region, default_family,
                            doubling_constant, generate_power_example, hm_class_constant, hm_full_lhs,
                            hm_global_lhs, hm_local_lhs, hm_mixed_lhs, loglog_slope, proof_recipe,
                            recipe_pair, related_weight_rigidity, rh_constant, rh_ratio, sup_report,
                            weight_integral)

FAMILY = ball_family(np.geomspace(1e-3, 1e3, 7), (0.0, 0.5, 2.0, 10.0))
ONE = Weight.constant()


def test_rh_constant_weight_is_one():
    for s in (2, 4, INF):
        assert rh_constant(ONE, s, FAMILY) == pytest.approx(1.0, rel=1e-12)


def test_rh_infinity_linear_weight():
    # sup = R, average = R/2 on B(0, R)
    assert rh_ratio(Weight.power(1.0), INF, Ball(0.0, 3.0)) == pytest.approx(2.0, rel=1e-12)
    assert math.isfinite(rh_constant(Weight.power(1.0), INF, FAMILY))


def test_rh_divergent_square():
    assert math.isinf(rh_constant(Weight.power(-0.5), 2, [Ball(0.0, 1.0)]))


def test_rh_exponent_must_exceed_one():
    with pytest.raises(ValueError):
        rh_constant(ONE, 1, FAMILY)


@settings(max_examples=25, deadline=None)
@given(a=st.floats(-0.45, 3.0), s=st.floats(1.1, 6.0))
def test_rh_monotone_in_s(a, s):
    w = Weight.power(a)
    balls = ball_family((1e-2, 1.0, 1e2), (0.0, 0.5, 2.0))
    lo, hi = rh_constant(w, s, balls), rh_constant(w, 2 * s, balls)
    assert lo <= hi * (1 + 1e-9)


@pytest.mark.parametrize("w, ball, expected", [
    (ONE, Ball(0.3, 1.0), 2.0),
    (Weight.power(1.0), Ball(0.0, 1.0), 4.0),
])
def test_doubling_values(w, ball, expected):
    assert doubling_constant(w, [ball]) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("a", [-0.5, 0.5, 1.0, 2.0])
def test_doubling_power_bound(a):
    assert doubling_constant(Weight.power(a), FAMILY) <= 2 ** (1 + abs(a)) * (1 + 1e-10)


def test_weight_integral_power():
    assert weight_integral(Weight.power(2.0), Ball(0.0, 1.0)) == pytest.approx(2 / 3, rel=1e-12)


def _weight_only(m, beta, delta, dt):
    return ParamSet(m, 1, 0.5, delta, dt, beta)


def test_local_constant_weights_is_power_of_radius():
    params = _weight_only(2, 1.0, 0.5, 0.2)
    pv = ExponentVector([4, 4])
    pair = WeightPair.related_pair([ONE, ONE])
    expo = -0.2 + 1.0 - 0.5
    for R in (1e-3, 0.1, 10.0):
        B = Ball(0.0, R)
        assert hm_local_lhs(pair, params, pv, B) == pytest.approx((2 * R) ** expo, rel=1e-12)


def test_local_constant_weights_on_edge_is_one():
    params = _weight_only(2, 1.0, 0.5, 0.5)
    pv = ExponentVector([4, 4])
    pair = WeightPair.related_pair([ONE, ONE])
    for B in ball_family((1e-3, 1.0, 1e3), (0.0, 3.0)):
        assert hm_local_lhs(pair, params, pv, B) == pytest.approx(1.0, rel=1e-12)


def test_mixed_ones_matches_local():
    params = ParamSet(2, 1, 0.5, 0.1, -1.5, 0.7)
    pv = ExponentVector([4, 4])
    rec = proof_recipe(ParamSet(2, 1, 0.5, 0.1, -1.5, 0.7), pv)
    pair = recipe_pair(rec)
    for B in (Ball(0.0, 1.0), Ball(2.0, 0.5)):
        loc = hm_local_lhs(pair, params, pv, B)
        mix = hm_mixed_lhs(pair, params, pv, B, SigmaMask.ones(2), 1.0)
        assert mix == pytest.approx(loc, rel=1e-6)


C_LAMBDA = 50.0


def test_mixed_dominated_by_full():
    params = ParamSet(2, 1, 0.5, 0.1, -1.5, 0.7)
    pv = ExponentVector([4, 4])
    pair = recipe_pair(proof_recipe(params, pv))
    for B in (Ball(0.0, 0.1), Ball(1.0, 1.0), Ball(-30.0, 2.0)):
        full = hm_full_lhs(pair, params, pv, B)
        for bits in ((0, 0), (0, 1), (1, 0), (1, 1)):
            assert hm_mixed_lhs(pair, params, pv, B, SigmaMask(bits), 2.0) <= C_LAMBDA * full


def test_global_constant_weights_closed_form():
    # sigma = 0, weights = 1: |B|^{1 + delta - delta_tilde} / |B| times
    # (int_{|y| > R} |y|^{-2e} dy)^{1/2} with kernel exponent e = 1 - beta + delta = 1
    params = ParamSet(1, 1, 0.5, 0.5, 0.0, 0.5)
    pv = ExponentVector([2])
    pair = WeightPair.related_pair([ONE])
    R = 2.0
    tail = (2 / R) ** 0.5
    expected = (2 * R) ** 0.5 * tail
    got = hm_global_lhs(pair, params, pv, Ball(0.0, R), QuadSpec(rel_tol=1e-10, abs_tol=1e-14))
    assert got == pytest.approx(expected, rel=1e-6)


def test_nonintegrable_kernel_tail():
    params = ParamSet(1, 1, 0.5, 0.0, 0.0, 1.0)
    pair = WeightPair.related_pair([ONE])
    with pytest.raises(NonIntegrableTail):
        hm_full_lhs(pair, params, ExponentVector(["inf"]), Ball(0.0, 1.0))


@pytest.mark.parametrize("dt, expected", [
    (0.3, "nontrivial"), (0.5, "boundary-excluded"), (0.6, "trivial"),
])
def test_classify_beta_above_delta(dt, expected):
    # delta = 0.5 and beta - n/p = 1 - 1/2 = 0.5 meet at delta_tilde = 0.5
    assert classify_region(ParamSet(2, 1, 0.5, 0.5, dt, 1.0), ExponentVector([4, 4])) == expected


def test_classify_reference_cases():
    pv = ExponentVector([8, 8])  # beta - n/p = 1.0 - 0.25 = 0.75
    assert classify_region(ParamSet(2, 1, 0.5, 0.5, 0.5, 1.0), pv) == "nontrivial"
    assert classify_region(ParamSet(2, 1, 0.5, 0.5, 0.6, 1.0), pv) == "trivial"
    edge = ExponentVector([4, 4])
    assert classify_region(ParamSet(2, 1, 0.5, 0.5, 0.5, 1.0), edge) == "boundary-excluded"


def test_recipe_single_factor():
    params = ParamSet(1, 1, 0.5, 0.1, -1.0, 0.5)
    rec = proof_recipe(params, ExponentVector([2]))
    assert rec.q[0] == pytest.approx(0.1)
    assert rec.tau[0] == pytest.approx(0.25)
    assert rec.eta == pytest.approx(-0.75)


@pytest.mark.parametrize("dt", [0.6, 0.5])
def test_recipe_rejects_trivial_cells(dt):
    # delta_tilde > delta, and delta_tilde = delta = beta - n/p
    with pytest.raises(RegionViolation):
        generate_power_example(ParamSet(2, 1, 0.5, 0.5, dt, 1.0), ExponentVector([4, 4]))


def test_recipe_invariants():
    params = ParamSet(2, 1, 0.5, 0.3, -1.4, 0.8)
    pv = ExponentVector([1, 3])
    rec = proof_recipe(params, pv)
    eta = params.delta_tilde + sum(rec.tau) + float(pv.inv_p) - params.beta
    assert rec.eta == pytest.approx(eta, abs=1e-14)
    assert rec.eta < 0 and rec.nu > 0
    assert 0 < rec.tau_common < min(rec.nu, 1 + (0.3 - 0.8) / 2)


def test_recipe_pair_bounded():
    params = ParamSet(2, 1, 0.5, 0.1, -1.5, 0.7)
    pv = ExponentVector([4, 4])
    pair, rec = generate_power_example(params, pv, "proof-recipe")
    rep = hm_class_constant(pair, params, pv, default_family(1, 2))
    assert rep.finite and rep.bounded(0.05)


def test_exponent_search_canonical():
    params = ParamSet(2, 1, 0.6, 0.1, 0.05, 0.7)
    pv = ExponentVector([4, 4])
    pair, rec = generate_power_example(params, pv, "auto", rh_order=2)
    assert rec.strategy == "exponent-search"
    assert pair.w.exponent == pytest.approx(rec.eta)
    assert [v.exponent for v in pair.v] == pytest.approx(list(rec.tau))
    fam = default_family(1, 2, centers=(0.0, 0.5, 2.0, 10.0, 100.0, 1000.0))
    assert hm_class_constant(pair, params, pv, fam).bounded(0.05)


def test_loglog_slope_exact():
    xs = np.geomspace(1e-3, 1e3, 9)
    assert loglog_slope(xs, xs ** -0.7) == pytest.approx(-0.7, abs=1e-12)


def test_rigidity_constant_weights():
    params = ParamSet(2, 1, 0.5, 0.5, 0.0, 1.5)
    pv = ExponentVector(["3/2", "3/2"])  # 1/p = 4/3
    radii = np.geomspace(1e-3, 1e3, 7)
    edge = 1.5 - 4 / 3
    flat = related_weight_rigidity([ONE, ONE], params.with_(delta_tilde=edge), pv, radii)
    assert flat.slope == pytest.approx(0.0, abs=1e-12)
    low = related_weight_rigidity([ONE, ONE], params.with_(delta_tilde=edge - 0.3), pv, radii)
    assert low.slope == pytest.approx(0.3, abs=1e-12)


def _center_rows(profile):
    return [(Ball(t * 2.0, 2.0), profile(t)) for t in (0.0, 0.5, 2.0, 10.0, 100.0, 1000.0)]


@pytest.mark.parametrize("profile, bounded", [
    (lambda t: 5.0, True),
    (lambda t: 100.0 - 50.0 * (1 + t) ** -0.07, True),
    (lambda t: 1.0 + math.log1p(t), False),
    # growth slower than the slope tolerance is indistinguishable from a plateau
    (lambda t: (1 + t) ** 0.02, True),
    (lambda t: (1 + t) ** 0.1, False),
    (lambda t: (1 + t) ** 0.5, False),
])
def test_far_center_criterion(profile, bounded):
    rep = sup_report(_center_rows(profile), 1)
    assert rep.bounded(0.05) is bounded


def test_far_center_limit_extrapolation():
    # geometric increments 9, 9q, 9q^2 ... sum to 9/(1 - q)
    q = 0.8
    values = {0.0: 1.0, 0.5: 1.0, 2.0: 1.0, 10.0: 10.0, 100.0: 10.0 + 9 * q, 1000.0: 10.0 + 9 * q + 9 * q * q}
    rep = sup_report([(Ball(t, 1.0), v) for t, v in values.items()], 1)
    assert rep.center_ratio == pytest.approx(q)
    assert rep.center_limit == pytest.approx(10.0 + 9 / (1 - q) - 9, rel=1e-12)
