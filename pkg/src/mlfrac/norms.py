"""Ball oscillations, weighted Lipschitz functionals and weighted Lebesgue norms (n = 1).

Integrals over a ball use composite Gauss panels.  Panels break at the
declared irregular points of the integrand and at the dyadic offsets
``p +- 2^k`` around each of them.  Because these offsets do not depend on
the ball, neighbouring balls share interior panels, and a memoized integrand
is evaluated only once per node.  Sign changes of ``f - f_B`` are located by
root finding and become extra panel boundaries, so the absolute value is
integrated without loss of order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from mlfrac.core import Ball, INF
from mlfrac.quadrature import QuadSpec, _legendre01, integrate_interval
from mlfrac.weights import Weight, ess_sup_ball, inverse_mass


@dataclass(frozen=True)
class OscillationRule:
    """Panel layout for ball integrals.

    ``depth`` and ``singular_depth`` bound the dyadic offsets below
    ``diameter * 2^-depth`` around ordinary and singular points.
    """

    order: int = 8
    depth: int = 12
    singular_depth: int = 30
    root_xtol: float = 1e-13


DEFAULT_OSC_RULE = OscillationRule()


class Memo:
    """Scalar function wrapper that caches values by argument."""

    def __init__(self, f: Callable[[float], float]):
        self.f = f
        self.cache: dict = {}

    def __call__(self, x: float) -> float:
        x = float(x)
        v = self.cache.get(x)
        if v is None:
            v = float(self.f(x))
            self.cache[x] = v
        return v

    def many(self, xs) -> np.ndarray:
        return np.array([self(x) for x in xs])


def _evaluate(f, xs: np.ndarray) -> np.ndarray:
    if isinstance(f, Memo):
        return f.many(xs)
    try:
        out = np.asarray(f(xs), dtype=float)
        if out.shape == xs.shape:
            return out
        if out.ndim == 0:
            return np.full(xs.shape, float(out))
    except (TypeError, ValueError):
        pass
    return np.array([float(f(float(x))) for x in xs])


def panel_breaks(lo: float, hi: float, points: Sequence[float] = (), singular: Sequence[float] = (),
                 rule: OscillationRule = DEFAULT_OSC_RULE) -> list:
    """Sorted panel boundaries in [lo, hi]."""
    width = hi - lo
    out = {lo, hi}
    for pts, depth in ((points, rule.depth), (singular, rule.singular_depth)):
        k_min = math.floor(math.log2(width)) - depth
        k_max = math.ceil(math.log2(width)) + 1
        for p in pts:
            p = float(p)
            if p + 2.0 ** k_max < lo or p - 2.0 ** k_max > hi:
                continue
            if lo < p < hi:
                out.add(p)
            for k in range(k_min, k_max + 1):
                for q in (p - 2.0 ** k, p + 2.0 ** k):
                    if lo < q < hi:
                        out.add(q)
    return sorted(out)


def _nodes(breaks: Sequence[float], order: int):
    u, w = _legendre01(order)
    br = np.asarray(breaks, dtype=float)
    h = np.diff(br)
    return (br[:-1, None] + h[:, None] * u[None, :]), h[:, None] * w[None, :]


def _abs_integral(f, breaks, fx, wx, center: float, rule: OscillationRule) -> float:
    """Integral of |f - center| over the panels, splitting at sign changes."""
    u, w = _legendre01(rule.order)
    total = []
    for k in range(len(breaks) - 1):
        d = fx[k] - center
        if np.all(d >= 0) or np.all(d <= 0):
            total.append(float(np.abs(d) @ wx[k]))
            continue
        a, b = breaks[k], breaks[k + 1]
        # roots of f - center between consecutive nodes of opposite sign
        xs = np.concatenate(([a], a + (b - a) * u, [b]))
        g = lambda t: float(_evaluate(f, np.array([t]))[0]) - center
        vals = [g(a)] + list(d) + [g(b)]
        cuts = [a]
        for i in range(len(xs) - 1):
            if vals[i] == 0.0 and 0 < i < len(xs) - 1:
                cuts.append(xs[i])
            elif vals[i] * vals[i + 1] < 0:
                cuts.append(optimize.brentq(g, xs[i], xs[i + 1], xtol=rule.root_xtol * max(1.0, abs(xs[i]))))
        cuts.append(b)
        cuts = sorted(set(cuts))
        nodes, weights = _nodes(cuts, rule.order)
        vals2 = _evaluate(f, nodes.ravel()).reshape(nodes.shape)
        total.append(float(np.sum(np.abs(vals2 - center) * weights)))
    return math.fsum(total)


def oscillation(f: Callable, B: Ball, spec: QuadSpec = QuadSpec(), points: Sequence[float] = (),
                singular: Sequence[float] = (), rule: OscillationRule = DEFAULT_OSC_RULE,
                breaks: Sequence[float] | None = None) -> float:
    """The integral over B of |f - f_B| with f_B the mean of f over B (n = 1).

    ``points`` are kinks or jumps of ``f``; ``singular`` are points where
    its derivative is unbounded.  Explicit panel ``breaks`` (for instance
    those of a :class:`PiecewiseChebyshev`) replace the dyadic layout.
    ``spec`` is accepted for interface uniformity; accuracy is governed by
    ``rule``.
    """
    if B.n != 1:
        raise NotImplementedError("oscillation is implemented for n = 1")
    c, R = B.center[0], B.radius
    if breaks is None:
        breaks = panel_breaks(c - R, c + R, points, singular, rule)
    else:
        lo, hi = c - R, c + R
        breaks = sorted({lo, hi, *(float(b) for b in breaks if lo < b < hi)})
    nodes, weights = _nodes(breaks, rule.order)
    fx = _evaluate(f, nodes.ravel()).reshape(nodes.shape)
    # mean taken relative to one sample, so constants give exactly zero
    ref = float(fx.flat[0])
    mean = ref + math.fsum(((fx - ref) * weights).ravel()) / (2 * R)
    return _abs_integral(f, breaks, fx, weights, mean, rule)


def lipschitz_cal_functional(f: Callable, w: Weight, delta_t: float, B: Ball, spec: QuadSpec = QuadSpec(),
                             points=(), singular=(), osc: float | None = None) -> float:
    """osc(f, B) / (w^{-1}(B) |B|^{delta_t/n}).

    A divergent w^{-1}(B) makes the functional 0 on that ball.
    """
    o = oscillation(f, B, spec, points, singular) if osc is None else osc
    inv = inverse_mass(w, B, spec)
    if not math.isfinite(inv):
        return 0.0
    return o / (inv * B.volume ** (delta_t / B.n))


def lipschitz_bb_functional(f: Callable, w: Weight, delta_t: float, B: Ball, spec: QuadSpec = QuadSpec(),
                            points=(), singular=(), osc: float | None = None) -> float:
    """||w chi_B||_oo osc(f, B) / |B|^{1 + delta_t/n}."""
    o = oscillation(f, B, spec, points, singular) if osc is None else osc
    sup = ess_sup_ball(w, B)
    if not math.isfinite(sup):
        return math.inf if o > 0 else 0.0
    return sup * o / B.volume ** (1 + delta_t / B.n)


FUNCTIONALS = {"cal": lipschitz_cal_functional, "bb": lipschitz_bb_functional}


@dataclass
class BallFunctionalReport:
    values: list
    sup: float
    argmax: Ball | None
    family: str = ""
    which: str = ""
    balls: list = field(default_factory=list)

    def to_rows(self) -> list:
        return [{"center": b.center[0], "radius": b.radius, "value": v}
                for b, v in zip(self.balls, self.values)]

    def radius_slope(self, top: int = 3) -> float:
        """Log-log slope of the per-radius maxima over the ``top`` largest radii."""
        groups: dict = {}
        for b, v in zip(self.balls, self.values):
            groups[b.radius] = max(groups.get(b.radius, 0.0), v)
        radii = sorted(groups)[-top:]
        vals = [groups[r] for r in radii]
        if len(radii) < 2 or min(vals) <= 0:
            return 0.0
        return float(np.polyfit(np.log(radii), np.log(vals), 1)[0])


def lipschitz_norm(f: Callable, w: Weight, delta_t: float, balls: Sequence[Ball], which: str = "cal",
                   spec: QuadSpec = QuadSpec(), points=(), singular=(), family: str = "") -> BallFunctionalReport:
    """Sup over ``balls`` of the chosen functional."""
    if not balls:
        raise ValueError("ball family must be nonempty")
    fn = FUNCTIONALS[which]
    g = f if isinstance(f, Memo) else Memo(f)
    values = [fn(g, w, delta_t, b, spec, points, singular) for b in balls]
    i = int(np.argmax(values))
    return BallFunctionalReport(values, float(values[i]), balls[i], family, which, list(balls))


def weighted_lp_norm(f: Callable, v: Weight, p, support: tuple, spec: QuadSpec = QuadSpec(),
                     points: Sequence[float] = ()) -> float:
    """(integral of |f v|^p)^(1/p) over ``support``, or the sup for p = oo (n = 1).

    The sup is a grid estimate polished by bounded minimization.
    """
    a, b = float(support[0]), float(support[1])
    pts = sorted({*points, *(float(s) for s in v.singular_points)})
    g = lambda y: abs(float(f(y)) * float(v(y)))
    if p is INF or float(p) == math.inf:
        grid = np.unique(np.concatenate((np.linspace(a, b, 2001), [q for q in pts if a <= q <= b])))
        vals = np.array([g(y) for y in grid])
        i = int(np.argmax(vals))
        best = float(vals[i])
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
        if hi > lo:
            res = optimize.minimize_scalar(lambda y: -g(y), bounds=(lo, hi), method="bounded")
            best = max(best, -float(res.fun))
        # one-sided limits at the ends of the support
        for end, inward in ((a, 1.0), (b, -1.0)):
            best = max(best, g(end + inward * 1e-12 * max(1.0, abs(end))))
        return best
    p = float(p)
    if p < 1:
        raise ValueError("p must lie in [1, oo]")
    res = integrate_interval(lambda y: g(y) ** p, a, b, spec.with_(rel_tol=min(spec.rel_tol, 1e-8)),
                             [q for q in pts if a < q < b])
    if not math.isfinite(res.value):
        return math.inf
    return res.value ** (1.0 / p)
