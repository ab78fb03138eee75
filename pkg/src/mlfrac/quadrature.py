"""Adaptive integration over balls, complements of balls and products of them.

Every routine returns an :class:`IntegralResult`.  One-dimensional pieces are
handed to QUADPACK (``scipy.integrate.quad``) after splitting at declared
singular points, so singularities always sit at panel endpoints where the
extrapolation in QAGS handles integrable algebraic blow-up.  Complements of
balls are summed over dyadic shells ``B_{k+1} \\ B_k`` with a geometric tail
correction taken from the integrand's power decay.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

from mlfrac.core import Ball


class NonIntegrableTail(ArithmeticError):
    """The integrand does not decay fast enough at infinity."""


class QuadratureError(ArithmeticError):
    """The integrand is not integrable on a bounded piece of the domain."""


@dataclass(frozen=True)
class QuadSpec:
    rel_tol: float = 1e-6
    abs_tol: float = 1e-12
    max_subdiv: int = 200
    truncation_radius_factor: float = 2.0 ** 15
    max_shells: int = 400

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.truncation_radius_factor < 2:
            raise ValueError("truncation_radius_factor must be >= 2")

    def tolerance(self, value: float) -> float:
        return self.rel_tol * abs(value) + self.abs_tol

    def with_(self, **changes) -> "QuadSpec":
        data = dict(rel_tol=self.rel_tol, abs_tol=self.abs_tol, max_subdiv=self.max_subdiv,
                    truncation_radius_factor=self.truncation_radius_factor,
                    max_shells=self.max_shells)
        data.update(changes)
        return QuadSpec(**data)


@dataclass(frozen=True)
class IntegralResult:
    value: float
    err_estimate: float = 0.0
    tail_bound: float = 0.0
    converged: bool = True

    def __float__(self):
        return float(self.value)

    def __add__(self, other: "IntegralResult") -> "IntegralResult":
        return combine([self, other])

    def scaled(self, c: float) -> "IntegralResult":
        return IntegralResult(c * self.value, abs(c) * self.err_estimate,
                              abs(c) * self.tail_bound, self.converged)


def combine(parts: Sequence[IntegralResult]) -> IntegralResult:
    """Sum partial results in their given order (compensated)."""
    if not parts:
        return IntegralResult(0.0)
    return IntegralResult(
        math.fsum(p.value for p in parts),
        math.fsum(p.err_estimate for p in parts),
        math.fsum(p.tail_bound for p in parts),
        all(p.converged for p in parts),
    )


def _quad(f, a, b, spec: QuadSpec, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, a, b, epsabs=spec.abs_tol * 1e-2, epsrel=spec.rel_tol * 1e-2,
                                      limit=spec.max_subdiv, **kw)
            ok = True
        except integrate.IntegrationWarning:
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err = integrate.quad(f, a, b, epsabs=spec.abs_tol * 1e-2, epsrel=spec.rel_tol * 1e-2,
                                      limit=spec.max_subdiv, **kw)
            ok = err <= spec.tolerance(val)
    if not math.isfinite(val):
        raise QuadratureError(f"non-finite integral on [{a}, {b}]")
    return val, err, ok


def integrate_interval(f: Callable[[float], float], a: float, b: float, spec: QuadSpec,
                       points: Sequence[float] = ()) -> IntegralResult:
    """Integrate ``f`` over [a, b], splitting at the interior ``points``."""
    if b <= a:
        return IntegralResult(0.0)
    cuts = sorted({float(p) for p in points if a < p < b})
    edges = [a, *cuts, b]
    parts = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err, ok = _quad(f, lo, hi, spec)
        parts.append(IntegralResult(val, err, 0.0, ok))
    return combine(parts)


def integrate_power_singular(g: Callable[[float], float], exponent: float, upper: float,
                             spec: QuadSpec, points: Sequence[float] = ()) -> IntegralResult:
    """Integrate ``r**exponent * g(r)`` over [0, upper] with exponent > -1.

    The first panel uses the algebraic weight of QAWS so the endpoint
    singularity is integrated exactly; later panels are ordinary.
    """
    if upper <= 0:
        return IntegralResult(0.0)
    if exponent <= -1:
        raise QuadratureError(f"r^{exponent} is not integrable at 0")
    cuts = sorted({float(p) for p in points if 0 < p < upper})
    edges = [0.0, *cuts, upper]
    parts = []
    lo, hi = edges[0], edges[1]
    if exponent == 0:
        val, err, ok = _quad(g, lo, hi, spec)
    else:
        val, err, ok = _quad(g, lo, hi, spec, weight="alg", wvar=(exponent, 0.0))
    parts.append(IntegralResult(val, err, 0.0, ok))
    for lo, hi in zip(edges[1:-1], edges[2:]):
        val, err, ok = _quad(lambda r: r ** exponent * g(r), lo, hi, spec)
        parts.append(IntegralResult(val, err, 0.0, ok))
    return combine(parts)


def _as_point(x, n):
    if n == 1:
        return np.array([float(np.ravel(x)[0]) if np.ndim(x) else float(x)])
    return np.asarray(x, dtype=float).reshape(n)


def _call(f, y, n):
    return f(float(y[0])) if n == 1 else f(y)


def _ray_exit(origin, u, ball: Ball) -> float:
    """Distance from ``origin`` (inside ``ball``) along unit ``u`` to the sphere."""
    d = origin - np.asarray(ball.center)
    du = float(d @ u)
    disc = du * du - float(d @ d) + ball.radius ** 2
    return max(-du + math.sqrt(max(disc, 0.0)), 0.0)


def integrate_ball(f: Callable, ball: Ball, spec: QuadSpec = QuadSpec(),
                   singular_points: Sequence = ()) -> IntegralResult:
    """Integrate ``f`` over the open ball; ``f`` takes a float when n = 1.

    For n = 2 the integral is taken in polar coordinates about the declared
    singular point lying in the ball (or about the centre), which removes an
    integrable point singularity through the Jacobian.
    """
    n = ball.n
    c, R = np.asarray(ball.center), ball.radius
    if n == 1:
        pts = [float(np.ravel(s)[0]) if np.ndim(s) else float(s) for s in singular_points]
        return integrate_interval(f, c[0] - R, c[0] + R, spec, pts)
    if n != 2:
        raise NotImplementedError("integrate_ball supports n = 1 and n = 2")
    inside = [_as_point(s, 2) for s in singular_points if ball.contains(tuple(_as_point(s, 2)))]
    origin = inside[0] if inside else c

    def radial(phi):
        u = np.array([math.cos(phi), math.sin(phi)])
        rmax = _ray_exit(origin, u, ball)
        return integrate_interval(lambda r: r * f(origin + r * u), 0.0, rmax, spec).value

    res = integrate_interval(radial, 0.0, 2 * math.pi, spec)
    return res


def _shell_1d(f, c, r_in, r_out, spec, points):
    left = integrate_interval(f, c - r_out, c - r_in, spec, points)
    right = integrate_interval(f, c + r_in, c + r_out, spec, points)
    return combine([left, right])


def integrate_shell(f: Callable, center, r_in: float, r_out: float, spec: QuadSpec = QuadSpec(),
                    singular_points: Sequence = ()) -> IntegralResult:
    """Integrate over the annulus r_in <= |y - center| < r_out."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    n = center.size
    if n == 1:
        pts = [float(np.ravel(s)[0]) for s in singular_points]
        return _shell_1d(f, float(center[0]), r_in, r_out, spec, pts)
    if n != 2:
        raise NotImplementedError("integrate_shell supports n = 1 and n = 2")
    phis, rads = [], []
    for s in singular_points:
        d = _as_point(s, 2) - center
        rho = math.hypot(*d)
        if r_in <= rho <= r_out:
            phis.append(math.atan2(d[1], d[0]) % (2 * math.pi))
            rads.append(rho)

    def angular(phi):
        u = np.array([math.cos(phi), math.sin(phi)])
        return integrate_interval(lambda r: r * f(center + r * u), r_in, r_out, spec, rads).value

    return integrate_interval(angular, 0.0, 2 * math.pi, spec, phis)


def integrate_annular(f: Callable, center, R: float, spec: QuadSpec = QuadSpec(),
                      decay: float | None = None, singular_points: Sequence = ()) -> IntegralResult:
    """Integrate ``f`` over the complement of B(center, R) by dyadic shells.

    ``decay`` is an exponent s with |f(y)| <= C |y - center|^-s for large y.
    When s <= n the tail is rejected at once; without ``decay`` the exponent
    is read off the ratio of consecutive shells and eight consecutive
    non-decreasing shells mean a non-integrable tail.

    Shells are summed out to ``truncation_radius_factor * R`` and further
    until the geometric tail estimate beyond the last shell is below
    tolerance; that estimate is added to the value and the disagreement
    between the analytic and the observed shell ratio is reported as
    ``tail_bound``.
    """
    center_arr = np.atleast_1d(np.asarray(center, dtype=float))
    n = center_arr.size
    if decay is not None and decay <= n:
        raise NonIntegrableTail(f"decay exponent {decay} <= n = {n}")
    far = 0.0
    for s in singular_points:
        far = max(far, float(np.linalg.norm(_as_point(s, n) - center_arr)))
    k_min = max(int(math.ceil(math.log2(spec.truncation_radius_factor))),
                int(math.ceil(math.log2(max(far / R, 1.0)))) + 4)

    shells, parts = [], []
    nondecreasing = 0
    k = 0
    tail, tail_bound = 0.0, math.inf
    while True:
        r_in, r_out = R * 2.0 ** k, R * 2.0 ** (k + 1)
        piece = integrate_shell(f, center_arr, r_in, r_out, spec, singular_points)
        parts.append(piece)
        shells.append(piece.value)
        if len(shells) >= 2 and r_in > far:
            if abs(shells[-1]) >= abs(shells[-2]) * (1 - 1e-9) and shells[-1] != 0:
                nondecreasing += 1
            else:
                nondecreasing = 0
        if nondecreasing >= 8:
            raise NonIntegrableTail("eight consecutive non-decreasing shells")
        k += 1
        if k < k_min or len(shells) < 3:
            continue
        last, prev = shells[-1], shells[-2]
        observed = last / prev if prev != 0 else 0.0
        rho = 2.0 ** (n - decay) if decay is not None else observed
        rho = min(max(rho, 0.0), 0.999)
        tail = last * rho / (1 - rho)
        if 0 <= observed < 1:
            tail_obs = last * observed / (1 - observed)
        else:
            tail_obs = 2 * tail
        tail_bound = abs(tail - tail_obs) + 1e-3 * abs(tail)
        total = math.fsum(shells) + tail
        if tail_bound <= spec.tolerance(total) or k >= spec.max_shells:
            break
    body = combine(parts)
    converged = body.converged and tail_bound <= spec.tolerance(body.value + tail)
    return IntegralResult(body.value + tail, body.err_estimate, tail_bound, converged)


def integrate_complement_ball(f, ball: Ball, spec: QuadSpec = QuadSpec(), decay=None,
                              singular_points=()) -> IntegralResult:
    return integrate_annular(f, ball.center, ball.radius, spec, decay, singular_points)


def integrate_whole_space(f, ball: Ball, spec: QuadSpec = QuadSpec(), decay=None,
                          singular_points=()) -> IntegralResult:
    """Integral over R^n split as B plus its complement."""
    inner = integrate_ball(f, ball, spec, singular_points)
    outer = integrate_annular(f, ball.center, ball.radius, spec, decay, singular_points)
    return inner + outer


@dataclass(frozen=True)
class Region:
    """One factor of a product region: the ball itself or its complement."""

    ball: Ball
    inside: bool = True
    decay: float | None = None
    singular_points: tuple = ()


def integrate_product_region(g, regions: Sequence[Region], spec: QuadSpec = QuadSpec()) -> IntegralResult:
    """Integrate over the product of balls and ball complements.

    ``g`` is either a list of one-variable factors (the integrand is their
    product, integrated coordinatewise) or a callable of m coordinates
    (n = 1 only), in which case complements are truncated at
    ``truncation_radius_factor * R`` and the tail is estimated from the
    change between truncation at half that radius and at the full radius.
    """
    if isinstance(g, (list, tuple)):
        if len(g) != len(regions):
            raise ValueError("one factor per region required")
        values, errs, tails, ok = [], [], [], True
        for gi, reg in zip(g, regions):
            if reg.inside:
                r = integrate_ball(gi, reg.ball, spec, reg.singular_points)
            else:
                r = integrate_annular(gi, reg.ball.center, reg.ball.radius, spec, reg.decay,
                                      reg.singular_points)
            values.append(r.value)
            errs.append(r.err_estimate)
            tails.append(r.tail_bound)
            ok = ok and r.converged
        value = math.prod(values)
        # first-order propagation of the per-factor errors
        err = math.fsum(e * abs(value / v) if v else e for e, v in zip(errs, values))
        tail = math.fsum(t * abs(value / v) if v else t for t, v in zip(tails, values))
        return IntegralResult(value, err, tail, ok)

    if any(reg.ball.n != 1 for reg in regions):
        raise NotImplementedError("non-factorized product integrands require n = 1")

    def box_pieces(reg: Region, lam: float):
        c, R = reg.ball.center[0], reg.ball.radius
        sing = [float(np.ravel(s)[0]) for s in reg.singular_points]
        if reg.inside:
            edges = [[c - R, *sorted(s for s in sing if c - R < s < c + R), c + R]]
        else:
            L = lam * R
            edges = [[c - L, *sorted(s for s in sing if c - L < s < c - R), c - R],
                     [c + R, *sorted(s for s in sing if c + R < s < c + L), c + L]]
        return [(lo, hi) for e in edges for lo, hi in zip(e[:-1], e[1:])]

    def truncated(lam):
        pieces = [box_pieces(reg, lam) for reg in regions]
        import itertools

        total, err = [], []
        opts = {"limit": spec.max_subdiv, "epsrel": spec.rel_tol * 1e-2, "epsabs": spec.abs_tol * 1e-2}
        for box in itertools.product(*pieces):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                v, e = integrate.nquad(lambda *y: g(*y), list(box), opts=opts)
            total.append(v)
            err.append(e)
        return math.fsum(total), math.fsum(err)

    lam = spec.truncation_radius_factor if any(not r.inside for r in regions) else 1.0
    full, err = truncated(lam)
    tail = 0.0
    if lam > 1.0:
        half, _ = truncated(lam / 2)
        tail = abs(full - half)
    converged = err + tail <= spec.tolerance(full)
    return IntegralResult(full, err, tail, converged)


def region_sup(f: Callable[[float], float], center: float, r_in: float, r_out: float,
               singular_points: Sequence[float] = (), samples: int = 600) -> float:
    """Estimate sup of ``f`` over r_in <= |y - center| <= r_out (n = 1).

    The set may be unbounded (``r_out = inf``).  The estimate samples a
    log-spaced grid in the distance to ``center`` on both sides, adds the
    declared singular points, and polishes the best samples with bounded
    Brent steps.  It is an estimate, never a certified bound; an unbounded
    value is reported as ``inf``.
    """
    scale = max(r_in, abs(center), 1.0, *(abs(s) for s in singular_points))
    lo = r_in if r_in > 0 else 1e-12 * scale
    hi = r_out if math.isfinite(r_out) else 1e12 * scale
    dist = np.geomspace(lo, hi, samples)
    if r_in == 0:
        dist = np.concatenate([[0.0], dist])
    ys = list(center - dist[::-1]) + list(center + dist)
    for s in singular_points:
        if r_in <= abs(s - center) <= r_out:
            ys.extend([s, np.nextafter(s, -np.inf), np.nextafter(s, np.inf)])
    ys = np.array(sorted(set(float(y) for y in ys)))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        vals = np.array([f(y) for y in ys], dtype=float)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    if np.isinf(vals).any() and np.nanmax(vals) == np.inf:
        return math.inf
    best = float(np.max(vals))
    for idx in np.argsort(vals)[-4:]:
        a = ys[max(idx - 1, 0)]
        b = ys[min(idx + 1, len(ys) - 1)]
        if b <= a:
            continue
        res = optimize.minimize_scalar(lambda y: -f(y), bounds=(a, b), method="bounded",
                                       options={"xatol": 1e-12 * max(abs(a), abs(b), 1e-300)})
        if res.success and r_in <= abs(res.x - center) <= r_out:
            best = max(best, -float(res.fun))
    return best


@dataclass(frozen=True)
class PowerBallIntegral:
    value: float
    comparison: float

    @property
    def ratio(self) -> float:
        return self.value / self.comparison


def _signed_power_antiderivative(x: float, a: float) -> float:
    return math.copysign(abs(x) ** (a + 1), x) / (a + 1)


def _power_integral_1d(a: float, lo: float, hi: float, width: float | None = None) -> float:
    """Exact integral of |x|^a over [lo, hi] (a > -1, or any a away from 0).

    ``width`` is ``hi - lo`` when the caller knows it more accurately than
    the difference of the rounded endpoints.
    """
    width = hi - lo if width is None else width
    if a == -1:
        if lo >= 0 or hi <= 0:
            near, far = (lo, hi) if lo >= 0 else (-hi, -lo)
            return math.log1p(width / near)
        raise ValueError("|x|^-1 is not integrable across the origin")
    if lo >= 0 or hi <= 0:
        # same sign: avoid cancellation via expm1/log1p
        near, far = (lo, hi) if lo >= 0 else (-hi, -lo)
        if near == 0:
            return far ** (a + 1) / (a + 1)
        return near ** (a + 1) * math.expm1((a + 1) * math.log1p(width / near)) / (a + 1)
    return _signed_power_antiderivative(hi, a) - _signed_power_antiderivative(lo, a)


def power_ball_integral(a: float, ball: Ball, spec: QuadSpec = QuadSpec(rel_tol=1e-10)) -> PowerBallIntegral:
    """Integral of |x|^a over ``ball`` together with R^n max(R, |x_B|)^a."""
    n = ball.n
    if a <= -n:
        raise ValueError(f"|x|^{a} is not locally integrable in dimension {n}")
    R, d = ball.radius, ball.center_norm
    comparison = R ** n * max(R, d) ** a
    if n == 1:
        c = ball.center[0]
        lo, hi = (abs(c) - R, abs(c) + R) if abs(c) >= R else (c - R, c + R)
        value = _power_integral_1d(a, lo, hi, 2 * R)
    elif n == 2:
        if d == 0:
            value = 2 * math.pi * R ** (a + 2) / (a + 2)
        else:
            def arc(rho):
                if rho <= R - d:
                    return 2 * math.pi
                cosv = (rho * rho + d * d - R * R) / (2 * rho * d)
                return 2 * math.acos(min(1.0, max(-1.0, cosv)))

            lo, hi = abs(d - R), d + R
            full = 2 * math.pi * _power_integral_1d(a + 1, 0.0, R - d) if d < R else 0.0
            # |x|^a dx = rho^(a+1) drho dphi
            partial = integrate_interval(lambda r: r ** (a + 1) * arc(r), lo, hi, spec).value
            value = full + partial
    else:
        raise NotImplementedError("power_ball_integral supports n = 1 and n = 2")
    return PowerBallIntegral(value, comparison)


# -- fixed graded Gauss rules ---------------------------------------------------------

@dataclass(frozen=True)
class GradedRule:
    """Composite Gauss rule with geometric grading toward weak singularities.

    Panels adjacent to a graded endpoint shrink by ``ratio`` for ``levels``
    steps; every panel carries an ``order``-point Gauss-Legendre rule.  A
    power weight r^p at a panel's left end is integrated with ``order``-point
    Gauss-Jacobi on the innermost panel.
    """

    order: int = 12
    levels: int = 10
    ratio: float = 0.2

    def __post_init__(self):
        if self.order < 2 or self.levels < 0 or not 0 < self.ratio < 1:
            raise ValueError("invalid graded rule")


_LEG_CACHE: dict = {}
_JAC_CACHE: dict = {}


def _legendre01(order: int):
    if order not in _LEG_CACHE:
        u, w = np.polynomial.legendre.leggauss(order)
        _LEG_CACHE[order] = ((u + 1) / 2, w / 2)
    return _LEG_CACHE[order]


def _jacobi01(order: int, power: float):
    """Nodes and weights for int_0^1 u^power g(u) du."""
    key = (order, power)
    if key not in _JAC_CACHE:
        from scipy.special import roots_jacobi
        u, w = roots_jacobi(order, 0.0, power)
        _JAC_CACHE[key] = ((u + 1) / 2, w / 2 ** (power + 1))
    return _JAC_CACHE[key]


def _unit_breaks(rule: GradedRule, left: bool, right: bool) -> np.ndarray:
    g = rule.ratio ** np.arange(rule.levels, 0, -1)
    if left and right:
        return np.concatenate(([0.0], 0.5 * g, [0.5], 1 - 0.5 * g[::-1], [1.0]))
    if left:
        return np.concatenate(([0.0], g, [1.0]))
    if right:
        return np.concatenate(([0.0], 1 - g[::-1], [1.0]))
    return np.array([0.0, 1.0])


_REF_CACHE: dict = {}


def graded_reference(rule: GradedRule, left: bool, right: bool):
    """Nodes and weights on [0, 1] graded toward the flagged ends."""
    key = (rule, left, right)
    if key not in _REF_CACHE:
        br = _unit_breaks(rule, left, right)
        u, w = _legendre01(rule.order)
        h = np.diff(br)
        nodes = (br[:-1, None] + h[:, None] * u[None, :]).ravel()
        weights = (h[:, None] * w[None, :]).ravel()
        _REF_CACHE[key] = (nodes, weights)
    return _REF_CACHE[key]


def graded_nodes(a: float, b: float, rule: GradedRule, left: bool = False, right: bool = False,
                 power: float | None = None):
    """Nodes and weights on [a, b]; with ``power`` the weights include (x - a)^power.

    The weight is integrated exactly against polynomials on the innermost
    panel (Gauss-Jacobi) and by Gauss-Legendre elsewhere.
    """
    h = b - a
    if h <= 0:
        return np.empty(0), np.empty(0)
    if power is None or power == 0:
        u, w = graded_reference(rule, left, right)
        return a + h * u, h * w
    if left and power < 0:
        # the innermost panel carries mass ~ ratio^(levels (power + 1)); keep it tiny
        rule = GradedRule(rule.order, math.ceil(rule.levels / (power + 1)), rule.ratio)
    br = _unit_breaks(rule, left, right)
    ju, jw = _jacobi01(rule.order, power)
    first = br[1]
    nodes = [a + h * first * ju]
    weights = [(h * first) ** (power + 1) * jw]
    if len(br) > 2:
        u, w = _legendre01(rule.order)
        lo, hh = br[1:-1], np.diff(br[1:])
        x = (lo[:, None] + hh[:, None] * u[None, :]).ravel()
        wx = (hh[:, None] * w[None, :]).ravel()
        nodes.append(a + h * x)
        weights.append(h * wx * (h * x) ** power)
    return np.concatenate(nodes), np.concatenate(weights)


# -- piecewise Chebyshev interpolants ---------------------------------------------------

@dataclass
class PiecewiseChebyshev:
    """Interpolant of a scalar function on [lo, hi] by Chebyshev series on panels.

    Built by :meth:`build`, which splits a panel until its trailing
    coefficients fall below ``rel_tol`` times the panel's max |f| (plus
    ``abs_tol``).  Panels that reach ``min_width`` or contain a declared
    singular point are kept unresolved and counted in ``unresolved``.
    """

    breaks: np.ndarray
    coefs: list
    evaluations: int = 0
    unresolved: int = 0
    max_tail: float = 0.0

    @classmethod
    def build(cls, f: Callable[[float], float], lo: float, hi: float, breaks: Sequence[float] = (),
              singular: Sequence[float] = (), order: int = 16, rel_tol: float = 1e-9,
              abs_tol: float = 1e-15, min_width: float = 1e-12, max_panels: int = 20000) -> "PiecewiseChebyshev":
        u = np.cos(np.pi * (np.arange(order) + 0.5) / order)[::-1]
        pts = sorted({lo, hi, *(b for b in breaks if lo < b < hi)})
        todo = list(zip(pts[:-1], pts[1:]))
        done: list = []
        evals, unresolved, max_tail = 0, 0, 0.0
        sing = np.asarray(list(singular), dtype=float)
        while todo:
            a, b = todo.pop()
            x = 0.5 * (a + b) + 0.5 * (b - a) * u
            vals = np.array([float(f(t)) for t in x])
            evals += order
            if not np.all(np.isfinite(vals)):
                raise QuadratureError(f"non-finite values on [{a}, {b}]")
            c = np.polynomial.chebyshev.chebfit(u, vals, order - 1)
            tail = float(np.max(np.abs(c[-3:])))
            scale = float(np.max(np.abs(vals)))
            contains_sing = sing.size > 0 and bool(np.any((sing >= a) & (sing <= b)))
            small = (b - a) <= min_width * max(1.0, abs(a), abs(b))
            if tail <= rel_tol * scale + abs_tol or contains_sing or small \
                    or len(done) + len(todo) >= max_panels:
                if tail > rel_tol * scale + abs_tol:
                    unresolved += 1
                else:
                    max_tail = max(max_tail, tail)
                done.append((a, b, c))
                continue
            mid = 0.5 * (a + b)
            todo.extend([(a, mid), (mid, b)])
        done.sort(key=lambda t: t[0])
        br = np.array([d[0] for d in done] + [done[-1][1]])
        return cls(br, [d[2] for d in done], evals, unresolved, max_tail)

    @property
    def lo(self) -> float:
        return float(self.breaks[0])

    @property
    def hi(self) -> float:
        return float(self.breaks[-1])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any((x < self.lo) | (x > self.hi)):
            raise ValueError("evaluation outside the interpolation interval")
        idx = np.clip(np.searchsorted(self.breaks, x, side="right") - 1, 0, len(self.coefs) - 1)
        out = np.empty_like(x)
        flat, fidx = x.ravel(), idx.ravel()
        res = out.ravel()
        for k in np.unique(fidx):
            sel = fidx == k
            a, b = self.breaks[k], self.breaks[k + 1]
            t = (2 * flat[sel] - a - b) / (b - a)
            res[sel] = np.polynomial.chebyshev.chebval(t, self.coefs[k])
        out = res.reshape(x.shape)
        return float(out) if out.ndim == 0 else out
