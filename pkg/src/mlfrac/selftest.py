"""Fast deterministic property checks behind ``mlfrac selftest``.

Every check returns a row ``{check, value, expected, tolerance, pass}``; all
sampling flows from one generator seeded by ``(seed, label)``.
"""

from __future__ import annotations

import math
import zlib

import numpy as np

from mlfrac.core import INF, Ball, ExponentVector, ParamSet, as_exponent, dual
from mlfrac.norms import lipschitz_bb_functional, lipschitz_cal_functional, oscillation
from mlfrac.operators import (KernelSpec, Symbol, SymbolVector, TestFunction, difference_of_products,
                              ialpha_m, multilinear_integral, product_commutator_direct,
                              product_commutator_expansion, sum_commutator)
from mlfrac.quadrature import QuadSpec, integrate_interval, power_ball_integral
from mlfrac.weights import Weight, ball_family, classify_region, rh_constant
from mlfrac.experiments import rigidity_scan


def _rng(seed: int, label: str) -> np.random.Generator:
    return np.random.default_rng([int(seed) % 2 ** 63, zlib.crc32(label.encode())])


def _row(check: str, value: float, expected: float | None, tol: float | None, ok: bool) -> dict:
    return {"check": check, "value": value, "expected": expected, "tolerance": tol, "pass": bool(ok)}


def check_exponents() -> list:
    ps = [as_exponent(v) for v in (1, "4/3", 2, 4, "inf")]
    ok = all(dual(dual(p)) == p for p in ps)
    return [_row("dual of dual is identity", float(ok), 1.0, 0.0, ok)]


def difference_of_products_ulps(a, b, c) -> float:
    """|lhs - rhs| in ulps of the largest term of the identity."""
    lhs, rhs = difference_of_products(a, b, c)
    m = len(a)
    terms = [math.prod(x - y for x, y in zip(a, b)), math.prod(x - y for x, y in zip(c, b))]
    terms += [(a[j] - c[j]) * math.prod(a[i] - b[i] for i in range(j)) * math.prod(c[i] - b[i] for i in range(j + 1, m))
              for j in range(m)]
    scale = max(max(abs(t) for t in terms), math.ulp(0.0))
    return abs(lhs - rhs) / math.ulp(scale)


def check_difference_of_products(seed: int, count: int) -> list:
    rng = _rng(seed, "difference-of-products")
    worst = 0.0
    for _ in range(count):
        m = int(rng.integers(1, 6))
        a, b, c = (list(rng.uniform(-2, 2, m)) for _ in range(3))
        worst = max(worst, difference_of_products_ulps(a, b, c))
    return [_row("difference-of-products lhs vs rhs (ulps of scale)", worst, 0.0, 8.0, worst <= 8.0)]


def check_power_integrals(seed: int, count: int) -> list:
    rng = _rng(seed, "power-integral")
    rows = []
    for a in (-0.5, 0.0, 1.0, 2.0):
        worst = 0.0
        for _ in range(count):
            R = 10 ** rng.uniform(-3, 3)
            c = float(rng.choice((-1, 1)) * 10 ** rng.uniform(-3, 3))
            B = Ball(c, R)
            pb = power_ball_integral(a, B)
            ref = integrate_interval(lambda y: abs(y) ** a, c - R, c + R, QuadSpec(rel_tol=1e-12, abs_tol=1e-300),
                                     [0.0] if c - R < 0 < c + R else []).value
            worst = max(worst, abs(pb.value - ref) / abs(ref))
        rows.append(_row(f"closed-form power integral a={a:g}", worst, 0.0, 1e-9, worst <= 1e-9))
    B = Ball(3.0, 0.5)
    r0 = power_ball_integral(0.0, B).ratio
    rows.append(_row("power ratio a=0 equals 2", r0, 2.0, 1e-15, abs(r0 - 2.0) <= 1e-15))
    return rows


def check_fractional_integral() -> list:
    f = TestFunction.indicator(0.5, 0.5)
    rows = []
    v = ialpha_m([f], 0.0, 0.5)
    rows.append(_row("I_0.5 chi[0,1] at 0 equals 2", v, 2.0, 1e-12, abs(v - 2.0) <= 1e-12))
    v = ialpha_m([f], 0.5, 0.5)
    ex = 2 * math.sqrt(2.0)
    rows.append(_row("I_0.5 chi[0,1] at 1/2 equals 2 sqrt 2", v, ex, 1e-12, abs(v - ex) <= 1e-12))
    # bilinear: engines agree
    K = KernelSpec.standard(0.6, 2)
    g = [TestFunction.bump(0.0, 1.0), TestFunction.indicator(0.5, 1.0)]
    a = multilinear_integral(0.3, g, K, engine="graded").value
    b = multilinear_integral(0.3, g, K, QuadSpec(rel_tol=1e-10, abs_tol=1e-14), engine="adaptive").value
    rows.append(_row("graded vs adaptive bilinear integral", abs(a - b) / abs(b), 0.0, 1e-7, abs(a - b) <= 1e-7 * abs(b)))
    return rows


def check_commutators(seed: int, cases: int) -> list:
    rng = _rng(seed, "commutators")
    rows, worst = [], 0.0
    for _ in range(cases):
        alpha = float(rng.choice((0.3, 0.6, 1.1)))
        K = KernelSpec.standard(alpha, 2)
        b = SymbolVector([Symbol.power(float(rng.uniform(0.2, 0.9)), float(rng.uniform(-1, 1))),
                          Symbol.coordinate()])
        f = [TestFunction.bump(float(rng.uniform(-1, 1)), float(rng.uniform(0.5, 1.5))),
             TestFunction.indicator(float(rng.uniform(-1, 1)), float(rng.uniform(0.3, 1.0)))]
        x = float(rng.uniform(-2, 2))
        d = product_commutator_direct(b, f, x, K)
        e = product_commutator_expansion(b, f, x, K)
        worst = max(worst, abs(d - e) / max(abs(d), 1e-300))
    rows.append(_row("product commutator direct vs expansion", worst, 0.0, 1e-4, worst <= 1e-4))
    K = KernelSpec.standard(0.6, 2)
    f = [TestFunction.bump(0.0, 1.0), TestFunction.bump(0.5, 1.0)]
    const = SymbolVector([Symbol.constant(1.7), Symbol.constant(-0.4)])
    z = max(abs(sum_commutator(const, f, 0.2, "all", K)), abs(product_commutator_direct(const, f, 0.2, K)))
    rows.append(_row("constant symbols give zero commutators", z, 0.0, 1e-14, z <= 1e-14))
    b = SymbolVector([Symbol.power(0.4), Symbol.power(0.7, 0.3)])
    lam = 2.5
    bl = SymbolVector([Symbol.scaled(s, lam) for s in b])
    s1, s2 = sum_commutator(b, f, 0.4, "all", K), sum_commutator(bl, f, 0.4, "all", K)
    p1, p2 = product_commutator_direct(b, f, 0.4, K), product_commutator_direct(bl, f, 0.4, K)
    err = max(abs(s2 - lam * s1) / abs(lam * s1), abs(p2 - lam ** 2 * p1) / abs(lam ** 2 * p1))
    rows.append(_row("symbol scaling (lambda, lambda^m)", err, 0.0, 1e-12, err <= 1e-12))
    return rows


def check_reverse_hoelder() -> list:
    balls = ball_family((1e-2, 1.0, 1e2), (0.0, 0.5, 2.0, 10.0))
    rows = []
    for a in (0.0, 0.5, 1.0, 2.0):
        c = rh_constant(Weight.power(a), INF, balls)
        rows.append(_row(f"RH_oo constant of |x|^{a:g} finite", c, None, None, math.isfinite(c)))
    c = rh_constant(Weight.power(-0.5), 2, [Ball(0.0, 1.0)])
    rows.append(_row("RH_2 of |x|^-1/2 on origin ball infinite", c, math.inf, None, math.isinf(c)))
    w = Weight.power(0.7)
    cs = [rh_constant(w, s, balls) for s in (1.5, 2, 4, 8)]
    mono = all(x <= y * (1 + 1e-12) for x, y in zip(cs, cs[1:]))
    rows.append(_row("RH constants nondecreasing in s", cs[-1], None, None, mono))
    return rows


def check_norm_domination(seed: int, count: int) -> list:
    rng = _rng(seed, "norm-domination")
    w = Weight.power(0.3)
    f = lambda y: np.abs(np.asarray(y)) ** 0.5
    worst = math.inf
    for _ in range(count):
        B = Ball(float(rng.uniform(-3, 3)), float(10 ** rng.uniform(-2, 0.5)))
        o = oscillation(f, B, singular=(0.0,))
        cal = lipschitz_cal_functional(f, w, 0.2, B, osc=o)
        bb = lipschitz_bb_functional(f, w, 0.2, B, osc=o)
        worst = min(worst, bb - cal + 1e-8 * max(abs(cal), 1.0))
    return [_row("bb functional dominates cal functional", worst, None, 1e-8, worst >= 0)]


def check_regions() -> list:
    pv = ExponentVector([4, 4])
    base = ParamSet(2, 1, 0.5, 0.5, 0.0, 1.0)
    trivial = classify_region(base.with_(delta_tilde=0.6), pv)
    nontriv = classify_region(base.with_(delta_tilde=0.3), pv)
    ok = trivial == "trivial" and nontriv == "nontrivial"
    return [_row("region classification of two reference cells", float(ok), 1.0, 0.0, ok)]


def check_rigidity() -> list:
    # xi = p/(mp - 1) > 1 needs the harmonic exponent p below 1
    params = ParamSet(2, 1, 0.5, 0.5, 0.0, 1.5)
    pv = ExponentVector(["3/2", "3/2"])
    table = rigidity_scan([Weight.constant(), Weight.constant()], params, pv,
                          radii=tuple(10.0 ** k for k in range(-3, 4)))
    worst = max(abs(r.slope - r.expected) for r in table.rows)
    return [_row("constant-weight rigidity slopes equal -offset/n", worst, 0.0, 1e-9, worst <= 1e-9 and table.passed)]


def run_selftest(seed: int = 0, quick: bool = True) -> list:
    """Run all checks; ``quick`` trims sample counts."""
    k = 1 if quick else 5
    rows = []
    rows += check_exponents()
    rows += check_difference_of_products(seed, 200 * k)
    rows += check_power_integrals(seed, 10 * k)
    rows += check_fractional_integral()
    rows += check_commutators(seed, 2 * k)
    rows += check_reverse_hoelder()
    rows += check_norm_domination(seed, 20 * k)
    rows += check_regions()
    rows += check_rigidity()
    return rows
