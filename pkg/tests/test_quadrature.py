import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from mlfrac.core import Ball
from mlfrac.weights import power_integral
from mlfrac.quadrature import (GradedRule, NonIntegrableTail, PiecewiseChebyshev, QuadSpec, Region,
                               graded_nodes, integrate_annular, integrate_ball, integrate_interval,
                               integrate_power_singular, integrate_product_region, power_ball_integral)

TIGHT = QuadSpec(rel_tol=1e-10, abs_tol=1e-14)

# range of the ratio over t = |x_B|/R, from a 30-digit mpmath sweep
POWER_BRACKETS = {-0.5: (2.0, 4.0), 0.0: (2.0, 2.0), 1.0: (1.0, 2.0), 2.0: (2.0 / 3.0, 8.0 / 3.0)}


@pytest.mark.parametrize("f, ball, expected", [
    (lambda y: 1.0, Ball(0.0, 1.0), 2.0),
    (lambda y: abs(y) ** -0.5, Ball(0.0, 1.0), 4.0),
    (lambda y: y, Ball(1.0, 1.0), 2.0),
])
def test_integrate_ball(f, ball, expected):
    res = integrate_ball(f, ball, TIGHT, singular_points=[0.0])
    assert res.value == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("f, decay, expected", [
    (lambda y: abs(y) ** -2.0, 2.0, 2.0),
    (lambda y: (1 + abs(y)) ** -3.0, 3.0, 0.25),
])
def test_integrate_annular(f, decay, expected):
    res = integrate_annular(f, 0.0, 1.0, TIGHT, decay=decay)
    assert res.value == pytest.approx(expected, rel=1e-7)


def test_integrate_annular_observed_decay():
    res = integrate_annular(lambda y: abs(y) ** -2.0, 0.0, 1.0, TIGHT)
    assert res.value == pytest.approx(2.0, rel=1e-6)


def test_harmonic_tail_rejected():
    with pytest.raises(NonIntegrableTail):
        integrate_annular(lambda y: 1 / abs(y), 0.0, 1.0, TIGHT, decay=1.0)
    with pytest.raises(NonIntegrableTail):
        integrate_annular(lambda y: 1 / abs(y), 0.0, 1.0, TIGHT)


def test_product_region_values():
    B = Ball(0.0, 1.0)
    one = integrate_product_region([lambda y: 1.0, lambda y: 1.0], [Region(B), Region(B)], TIGHT)
    assert one.value == pytest.approx(4.0, rel=1e-10)
    sing = [lambda y: abs(y) ** -0.5] * 2
    val = integrate_product_region(sing, [Region(B, singular_points=(0.0,))] * 2, TIGHT)
    assert val.value == pytest.approx(16.0, rel=1e-8)
    tail = [lambda y: abs(y) ** -2.0] * 2
    val = integrate_product_region(tail, [Region(B, inside=False, decay=2.0)] * 2, TIGHT)
    assert val.value == pytest.approx(4.0, rel=1e-7)


@pytest.mark.parametrize("ball, a, value, ratio", [
    (Ball(3.0, 0.7), 0.0, 1.4, 2.0),
    (Ball(1.0, 1.0), 1.0, 2.0, 2.0),
    (Ball(0.0, 1.0), -0.5, 4.0, 4.0),
])
def test_power_ball_closed_form(ball, a, value, ratio):
    pb = power_ball_integral(a, ball)
    assert pb.value == pytest.approx(value, rel=1e-14)
    assert pb.ratio == pytest.approx(ratio, rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(a=st.sampled_from(sorted(POWER_BRACKETS)), log_r=st.floats(-3, 3), log_d=st.floats(-4, 3),
       sign=st.sampled_from((-1.0, 1.0)))
def test_power_ball_against_quadpack(a, log_r, log_d, sign):
    B = Ball(sign * 10 ** log_d, 10 ** log_r)
    c, R = B.center[0], B.radius
    pts = [0.0] if c - R < 0 < c + R else None
    ref, _ = integrate.quad(lambda y: abs(y) ** a, c - R, c + R, points=pts, epsabs=0, epsrel=1e-12, limit=200)
    assert power_ball_integral(a, B).value == pytest.approx(ref, rel=1e-9)
    lo, hi = POWER_BRACKETS[a]
    r = power_ball_integral(a, B).ratio
    assert lo * (1 - 1e-12) <= r <= hi * (1 + 1e-12)


def test_power_ball_rejects_nonintegrable():
    with pytest.raises(ValueError):
        power_ball_integral(-1.0, Ball(0.0, 1.0))


def test_power_singular_endpoint():
    res = integrate_power_singular(lambda r: math.cos(r), -0.5, 1.0, TIGHT)
    ref, _ = integrate.quad(lambda r: math.cos(r), 0, 1, weight="alg", wvar=(-0.5, 0), epsrel=1e-13)
    assert res.value == pytest.approx(ref, rel=1e-10)


def test_integrate_interval_points():
    res = integrate_interval(lambda y: abs(y - 0.3) ** 0.5, 0.0, 1.0, TIGHT, [0.3])
    expected = (0.3 ** 1.5 + 0.7 ** 1.5) / 1.5
    assert res.value == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("power", [-0.75, -0.5, 0.0, 0.4])
def test_graded_nodes_power_weight(power):
    x, w = graded_nodes(0.0, 2.0, GradedRule(), left=True, power=power)
    got = float(np.sum(w * np.exp(-x)))
    ref, _ = integrate.quad(lambda r: math.exp(-r), 0, 2, weight="alg", wvar=(power, 0), epsrel=1e-13)
    assert got == pytest.approx(ref, rel=1e-10)


def test_graded_nodes_log_singularity():
    x, w = graded_nodes(0.0, 1.0, GradedRule(), left=True, right=True)
    got = float(np.sum(w * np.log(x) * np.log(1 - x)))
    assert got == pytest.approx(2 - math.pi ** 2 / 6, rel=1e-7)


def test_graded_rule_validation():
    with pytest.raises(ValueError):
        GradedRule(order=1)
    with pytest.raises(ValueError):
        GradedRule(ratio=1.5)


def test_piecewise_chebyshev_kink():
    f = lambda y: abs(y - 0.2) + math.sin(3 * y)
    pc = PiecewiseChebyshev.build(f, -1.0, 1.0, breaks=[0.2], order=12, rel_tol=1e-10)
    xs = np.linspace(-1, 1, 301)
    assert np.max(np.abs(pc(xs) - np.array([f(t) for t in xs]))) < 1e-8
    assert pc.unresolved == 0
    with pytest.raises(ValueError):
        pc(1.5)


def test_quadspec_validation():
    with pytest.raises(ValueError):
        QuadSpec(rel_tol=0.0)
    assert QuadSpec().with_(rel_tol=1e-3).rel_tol == 1e-3


@pytest.mark.parametrize("a", [-1.5, -0.5, 0.0, 1.0, 2.0])
@pytest.mark.parametrize("c, R", [(627.498276967784, 0.003670894079097559), (-397.37, 1e-3), (5.0, 4.999)])
def test_power_ball_far_small_ball_oracle(a, c, R):
    # mpmath antiderivative at 40 digits; small balls far out cancel in double precision
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 40
    lo, hi = abs(mpmath.mpf(c)) - mpmath.mpf(R), abs(mpmath.mpf(c)) + mpmath.mpf(R)
    exact = (hi ** (a + 1) - lo ** (a + 1)) / (a + 1)
    assert power_integral(a, Ball(c, R)) == pytest.approx(float(exact), rel=1e-13)
