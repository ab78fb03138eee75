"""Weights, reverse Hölder and doubling constants, and the H_m weight class.

A pair ``(w, v)`` is tested against the H_m condition ball by ball.  Power
weights ``|x|^a`` are handled with closed-form ball integrals and exact
essential suprema; custom weights go through adaptive quadrature and grid
suprema, which are estimates.

Divergence is a verdict here, not an exception: evaluators return ``inf``
for divergent local quantities and growth slopes for unbounded families.
The one exception is a kernel tail that is not integrable at infinity,
which is a defect of the parameters and raises :class:`NonIntegrableTail`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from mlfrac.core import (INF, Ball, ExponentVector, ParamSet, SigmaMask, XiUndefined, dual, require_xi,
                         theta, to_float)
from mlfrac.quadrature import (NonIntegrableTail, QuadratureError, QuadSpec, _power_integral_1d,
                               integrate_annular, integrate_ball, integrate_interval,
                               power_ball_integral, region_sup)


class RegionViolation(ValueError):
    """Parameters outside the region where the requested example exists."""


class SearchFailure(RuntimeError):
    """No bounded power-weight candidate was found."""


class HypothesisViolation(RuntimeError):
    """A required hypothesis failed its numerical check."""


@dataclass(frozen=True)
class Weight:
    """A weight on R^n.  ``func`` takes a float when n = 1, an array otherwise."""

    func: Callable
    kind: str = "custom"
    exponent: float | None = None
    n: int = 1
    singular_points: tuple = ()
    label: str = ""

    def __call__(self, y):
        return self.func(y)

    @classmethod
    def power(cls, a: float, n: int = 1) -> "Weight":
        a = float(a)
        if n == 1:
            func = (lambda y: 1.0) if a == 0 else (lambda y: abs(y) ** a)
        else:
            func = (lambda y: 1.0) if a == 0 else (lambda y: float(np.linalg.norm(y)) ** a)
        origin = 0.0 if n == 1 else (0.0,) * n
        sing = () if a == 0 else (origin,)
        return cls(func, "power", a, n, sing, f"|x|^{a:g}")

    @classmethod
    def constant(cls, n: int = 1) -> "Weight":
        return cls.power(0.0, n)

    @classmethod
    def custom(cls, func: Callable, n: int = 1, singular_points=(), label="custom") -> "Weight":
        return cls(func, "custom", None, n, tuple(singular_points), label)

    @property
    def is_power(self) -> bool:
        return self.kind == "power"

    def pow(self, s: float) -> "Weight":
        """The weight w^s."""
        if self.is_power:
            return Weight.power(self.exponent * s, self.n)
        f = self.func
        return Weight(lambda y: f(y) ** s, "custom", None, self.n, self.singular_points,
                      f"({self.label})^{s:g}")

    def __mul__(self, other: "Weight") -> "Weight":
        if self.is_power and other.is_power:
            return Weight.power(self.exponent + other.exponent, self.n)
        f, g = self.func, other.func
        return Weight(lambda y: f(y) * g(y), "custom", None, self.n,
                      self.singular_points + other.singular_points,
                      f"{self.label}*{other.label}")

    def to_spec(self) -> dict:
        if self.is_power:
            return {"kind": "power", "exponent": self.exponent}
        return {"kind": "custom", "label": self.label}


def product_weight(weights: Sequence[Weight]) -> Weight:
    out = weights[0]
    for w in weights[1:]:
        out = out * w
    return out


@dataclass(frozen=True)
class WeightPair:
    w: Weight
    v: tuple
    related: bool = False

    @classmethod
    def related_pair(cls, v: Sequence[Weight]) -> "WeightPair":
        return cls(product_weight(list(v)), tuple(v), True)

    def check_related(self, samples: Sequence = (0.3, 1.7, -2.5, 11.0)) -> bool:
        prod = product_weight(list(self.v))
        return all(math.isclose(self.w(y), prod(y), rel_tol=1e-12) for y in samples)


@dataclass(frozen=True)
class PowerWeightRecipe:
    tau: tuple
    eta: float
    q: tuple
    nu: float
    tau_common: float | None
    m1: int
    strategy: str = "proof-recipe"

    def to_dict(self) -> dict:
        return {"tau": list(self.tau), "eta": self.eta, "q": list(self.q), "nu": self.nu,
                "tau_common": self.tau_common, "m1": self.m1, "strategy": self.strategy}


# -- elementary ball quantities ------------------------------------------------

def _origin_in_closure(ball: Ball) -> bool:
    return ball.center_norm <= ball.radius


def power_integral(a: float, ball: Ball, spec: QuadSpec = QuadSpec(rel_tol=1e-10)) -> float:
    """Integral of |x|^a over ``ball``; ``inf`` when it diverges at the origin."""
    n = ball.n
    if a <= -n:
        if _origin_in_closure(ball):
            return math.inf
        if n == 1:
            c, R = ball.center[0], ball.radius
            lo, hi = (abs(c) - R, abs(c) + R) if abs(c) >= R else (c - R, c + R)
            return _power_integral_1d(a, lo, hi, 2 * R)
        return integrate_ball(lambda y: float(np.linalg.norm(y)) ** a, ball, spec).value
    return power_ball_integral(a, ball, spec).value


def weight_integral(w: Weight, ball: Ball, spec: QuadSpec = QuadSpec()) -> float:
    """w(B), the integral of ``w`` over ``ball`` (``inf`` when divergent)."""
    if w.is_power:
        return power_integral(w.exponent, ball)
    try:
        res = integrate_ball(w.func, ball, spec, w.singular_points)
    except QuadratureError:
        return math.inf
    return res.value


def weight_average(w: Weight, ball: Ball, spec: QuadSpec = QuadSpec()) -> float:
    return weight_integral(w, ball, spec) / ball.volume


def inverse_mass(w: Weight, ball: Ball, spec: QuadSpec = QuadSpec()) -> float:
    """w^{-1}(B), the integral of 1/w over the ball."""
    return weight_integral(w.pow(-1.0), ball, spec)


def ess_sup_ball(w: Weight, ball: Ball) -> float:
    """Essential supremum of ``w`` over the ball (exact for power weights)."""
    if w.is_power:
        a, d, R = w.exponent, ball.center_norm, ball.radius
        if a >= 0:
            return (d + R) ** a
        return math.inf if d <= R else (d - R) ** a
    if ball.n != 1:
        raise NotImplementedError("grid suprema for custom weights need n = 1")
    sing = [float(s) for s in w.singular_points]
    return region_sup(w.func, ball.center[0], 0.0, ball.radius, sing)


# -- reverse Hölder and doubling ---------------------------------------------------

def rh_ratio(w: Weight, s, ball: Ball, spec: QuadSpec = QuadSpec()) -> float:
    """(avg_B w^s)^{1/s} / avg_B w, or ess sup_B w / avg_B w when s = oo."""
    avg = weight_average(w, ball, spec)
    if not math.isfinite(avg):
        return math.nan
    if s is INF or s == math.inf:
        return ess_sup_ball(w, ball) / avg
    s = float(s)
    top = weight_average(w.pow(s), ball, spec)
    if not math.isfinite(top):
        return math.inf
    return top ** (1.0 / s) / avg


def rh_constant(w: Weight, s, balls: Sequence[Ball], spec: QuadSpec = QuadSpec()) -> float:
    """Sup of the reverse Hölder ratio over ``balls``; ``inf`` when divergent."""
    if s is not INF and float(s) <= 1:
        raise ValueError("reverse Hölder exponent must exceed 1")
    best = 0.0
    for b in balls:
        r = rh_ratio(w, s, b, spec)
        if math.isnan(r):
            continue
        best = max(best, r)
    return best


def doubling_constant(w: Weight, balls: Sequence[Ball], spec: QuadSpec = QuadSpec()) -> float:
    """Sup of w(2B)/w(B) over ``balls``."""
    best = 0.0
    for b in balls:
        num = weight_integral(w, b.dilate(2.0), spec)
        den = weight_integral(w, b, spec)
        if den == 0 or not math.isfinite(den):
            return math.inf if den == 0 else best
        best = max(best, num / den)
    return best


# -- the dual-norm factors --------------------------------------------------------

def _kernel_decay(params: ParamSet, i: int) -> float:
    return params.n - params.beta_split[i] + params.delta / params.m


def _line_sup(v_inv: Weight, ball: Ball, e: float, shift: float, r_in: float, r_out: float) -> float:
    """Sup of v^{-1}(y) (shift + |x_B - y|)^{-e} over r_in <= |y - x_B| <= r_out.

    For power weights the supremum lies on the line through 0 and x_B, so
    the problem is one-dimensional in every dimension.
    """
    if v_inv.is_power:
        a = v_inv.exponent
        d = ball.center_norm if ball.n > 1 else ball.center[0]
        if a < 0 and r_in <= abs(d) <= r_out:
            return math.inf
        if math.isinf(r_out) and a > e:
            return math.inf

        def g(t):
            dist = abs(t - d)
            base = (shift + dist) ** (-e) if (shift + dist) > 0 else math.inf
            return (abs(t) ** a if a != 0 else 1.0) * base

        return region_sup(g, d, r_in, r_out, [0.0])
    if ball.n != 1:
        raise NotImplementedError("custom weights with p_i = 1 need n = 1")
    c = ball.center[0]

    def g(t):
        dist = abs(t - c)
        return v_inv.func(t) * (shift + dist) ** (-e)

    return region_sup(g, c, r_in, r_out, [float(s) for s in v_inv.singular_points])


def dual_norm_factor(v: Weight, p_i, e: float, ball: Ball, region: str,
                     spec: QuadSpec = QuadSpec(), lam: float = 1.0) -> float:
    """One factor of the H_m products.

    ``region`` selects the form:

    * ``"full"``: || v^{-1} / (|B|^{1/n} + |x_B - .|)^e ||_{p'} over R^n
    * ``"inside"``: || v^{-1} chi_{lam B} ||_{p'}
    * ``"outside"``: || v^{-1} chi_{R^n \\ lam B} / |x_B - .|^e ||_{p'}
    """
    n = ball.n
    pd = dual(p_i)
    v_inv = v.pow(-1.0)
    lb = ball.dilate(lam)
    shift = ball.volume ** (1.0 / n) if region == "full" else 0.0

    if pd is INF:
        if region == "inside":
            return ess_sup_ball(v_inv, lb)
        if region == "outside":
            return _line_sup(v_inv, ball, e, 0.0, lb.radius, math.inf)
        return _line_sup(v_inv, ball, e, shift, 0.0, math.inf)

    pd = float(pd)
    dens = v.pow(-pd)
    if region == "inside":
        total = weight_integral(dens, lb, spec)
        return total ** (1.0 / pd)

    decay = (e + v.exponent) * pd if v.is_power else None
    if decay is not None and decay <= n:
        raise NonIntegrableTail(f"kernel tail exponent {decay:g} <= n = {n}")
    c = np.asarray(ball.center) if n > 1 else ball.center[0]

    if n == 1:
        def integrand(y):
            return dens.func(y) * (shift + abs(c - y)) ** (-e * pd)
    else:
        def integrand(y):
            return dens.func(y) * (shift + float(np.linalg.norm(c - y))) ** (-e * pd)

    sing = dens.singular_points
    outer = integrate_annular(integrand, ball.center if n > 1 else c, lb.radius, spec, decay, sing)
    total = outer.value
    if region == "full":
        if dens.is_power and dens.exponent <= -n and _origin_in_closure(lb):
            return math.inf
        try:
            inner = integrate_ball(integrand, lb, spec, sing)
        except QuadratureError:
            return math.inf
        total += inner.value
    return total ** (1.0 / pd)


# -- the H_m conditions -------------------------------------------------------------

def _prefactor(pair: WeightPair, ball: Ball, exponent: float, spec: QuadSpec) -> float:
    mass = inverse_mass(pair.w, ball, spec)
    if not math.isfinite(mass) or mass == 0:
        return 0.0 if not math.isfinite(mass) else math.inf
    return ball.volume ** exponent / mass


def _check_decay(params: ParamSet):
    for i in range(params.m):
        if _kernel_decay(params, i) <= 0:
            raise NonIntegrableTail(f"n - beta_{i + 1} + delta/m <= 0")


def hm_full_lhs(pair: WeightPair, params: ParamSet, p_vec: ExponentVector, ball: Ball,
                spec: QuadSpec = QuadSpec()) -> float:
    """Left-hand side of the H_m(p, beta, delta_tilde) inequality at ``ball``."""
    _check_decay(params)
    n = params.n
    pref = _prefactor(pair, ball, 1 + (params.delta - params.delta_tilde) / n, spec)
    out = pref
    for i, (v, p_i) in enumerate(zip(pair.v, p_vec)):
        out *= dual_norm_factor(v, p_i, _kernel_decay(params, i), ball, "full", spec)
    return out


def hm_local_lhs(pair: WeightPair, params: ParamSet, p_vec: ExponentVector, ball: Ball,
                 spec: QuadSpec = QuadSpec()) -> float:
    """Local condition: the sigma = 1, lambda = 1 specialization written with averages."""
    n = params.n
    inv_p = float(p_vec.inv_p)
    expo = 1 - params.delta_tilde / n + params.beta / n - inv_p
    out = _prefactor(pair, ball, expo, spec)
    for i, (v, p_i) in enumerate(zip(pair.v, p_vec)):
        if p_i == 1:
            out *= ess_sup_ball(v.pow(-1.0), ball)
        else:
            pd = float(dual(p_i))
            out *= weight_average(v.pow(-pd), ball, spec) ** (1.0 / pd)
    return out


def hm_mixed_lhs(pair: WeightPair, params: ParamSet, p_vec: ExponentVector, ball: Ball,
                 sigma: SigmaMask, lam: float = 1.0, spec: QuadSpec = QuadSpec()) -> float:
    """The sigma/lambda-split condition: norms over lam*B where sigma_i = 1 and
    over the complement of lam*B (with the pure power kernel) where sigma_i = 0."""
    if lam < 1:
        raise ValueError("lambda must be >= 1")
    _check_decay(params)
    n = params.n
    expo = 1 + (params.delta - params.delta_tilde) / n - theta(sigma, params)
    out = _prefactor(pair, ball, expo, spec)
    for i, (v, p_i, s) in enumerate(zip(pair.v, p_vec, sigma)):
        region = "inside" if s else "outside"
        out *= dual_norm_factor(v, p_i, _kernel_decay(params, i), ball, region, spec, lam)
    return out


def hm_global_lhs(pair: WeightPair, params: ParamSet, p_vec: ExponentVector, ball: Ball,
                  spec: QuadSpec = QuadSpec()) -> float:
    return hm_mixed_lhs(pair, params, p_vec, ball, SigmaMask.zeros(params.m), 1.0, spec)


HM_FORMS = {
    "full": hm_full_lhs,
    "local": hm_local_lhs,
    "global": hm_global_lhs,
}


# -- sup over families --------------------------------------------------------------

def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(ys) against log(xs)."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    if len(lx) < 2:
        return 0.0
    return float(np.polyfit(lx, ly, 1)[0])


@dataclass
class SupReport:
    sup: float
    argmax: Ball | None
    rows: list = field(default_factory=list)
    slope_low: float = 0.0
    slope_high: float = 0.0
    center_slope: float = 0.0
    family: str = ""
    center_ratio: float = math.nan
    center_limit: float = math.nan

    @property
    def finite(self) -> bool:
        return math.isfinite(self.sup)

    @property
    def center_converges(self) -> bool:
        """Increments over the last equally log-spaced far centres shrink geometrically."""
        return self.center_ratio <= CENTER_RATIO_MAX

    def bounded(self, slope_tol: float = 0.05, one_sided: bool = False) -> bool:
        """Finite sup with flat per-radius maxima at both radius extremes.

        With ``one_sided`` only growth counts: the maxima may decay as the
        radius tends to 0 or to infinity.
        """
        if not self.finite:
            return False
        if one_sided:
            edges = -self.slope_low <= slope_tol and self.slope_high <= slope_tol
        else:
            edges = abs(self.slope_low) <= slope_tol and abs(self.slope_high) <= slope_tol
        return edges and (self.center_slope <= slope_tol or self.center_converges)

    def to_rows(self) -> list:
        return [{"center": b.center[0] if b.n == 1 else list(b.center), "radius": b.radius,
                 "value": v} for b, v in self.rows]


def per_radius_max(rows) -> tuple:
    groups: dict = {}
    for b, v in rows:
        groups[b.radius] = max(groups.get(b.radius, -math.inf), v)
    radii = sorted(groups)
    return radii, [groups[r] for r in radii]


def _edge_slopes(radii, maxima, n: int, k: int | None = None):
    vols = [r ** n for r in radii]
    if len(radii) < 2:
        return 0.0, 0.0
    k = k or max(3, len(radii) // 4)
    k = min(k, len(radii))
    good = all(v > 0 and math.isfinite(v) for v in maxima)
    if not good:
        return math.nan, math.nan
    return loglog_slope(vols[:k], maxima[:k]), loglog_slope(vols[-k:], maxima[-k:])


# A per-decade increment ratio q < 1 means a decaying correction t^-g with
# 10^-g = q; growth like t^s or log t gives q >= 1.
CENTER_RATIO_MAX = 0.95


def _far_center_profile(rows) -> tuple:
    """Growth of the per-ball value in t = |x_B|/R over the farthest centres.

    Returns the log-log slope over the last two centre factors, the ratio of
    the last two increments when the last three factors are equally
    log-spaced (else nan), and the geometric extrapolation of the value.
    """
    pts = [(b.center_norm / b.radius, v) for b, v in rows if b.center_norm > 0]
    by_t: dict = {}
    for t, v in pts:
        key = round(math.log10(t), 6)
        by_t[key] = max(by_t.get(key, -math.inf), v)
    keys = sorted(by_t)
    if len(keys) < 2:
        return 0.0, math.nan, math.nan
    vals = [by_t[k] for k in keys[-3:]]
    if not all(v > 0 and math.isfinite(v) for v in vals):
        inf = math.inf if any(math.isinf(v) for v in vals) else 0.0
        return inf, math.nan, math.nan
    slope = loglog_slope([10 ** k for k in keys[-2:]], vals[-2:])
    ratio = limit = math.nan
    if len(keys) >= 3 and math.isclose(keys[-1] - keys[-2], keys[-2] - keys[-3], rel_tol=1e-6):
        d1, d2 = vals[1] - vals[0], vals[2] - vals[1]
        if d1 > 0 and d2 >= 0:
            ratio = d2 / d1
            limit = vals[2] + d2 * ratio / (1 - ratio) if ratio < 1 else math.inf
        elif d2 <= 0:
            ratio, limit = 0.0, max(vals)
    return slope, ratio, limit


def sup_report(rows, n: int, family: str = "") -> SupReport:
    finite_rows = [(b, v) for b, v in rows if not math.isnan(v)]
    if not finite_rows:
        return SupReport(math.nan, None, rows, family=family)
    arg_b, arg_v = max(finite_rows, key=lambda bv: bv[1])
    radii, maxima = per_radius_max(finite_rows)
    lo, hi = _edge_slopes(radii, maxima, n)
    cs, ratio, limit = _far_center_profile(finite_rows)
    return SupReport(arg_v, arg_b, rows, lo, hi, cs, family, ratio, limit)


def hm_class_constant(pair: WeightPair, params: ParamSet, p_vec: ExponentVector,
                      balls: Sequence[Ball], spec: QuadSpec = QuadSpec(), form: str = "full",
                      family: str = "") -> SupReport:
    """Sup of the chosen H_m left-hand side over ``balls`` with growth slopes."""
    fn = HM_FORMS[form]
    rows = [(b, fn(pair, params, p_vec, b, spec)) for b in balls]
    return sup_report(rows, params.n, family)


def ball_family(radii: Sequence[float], center_factors: Sequence[float], n: int = 1) -> list:
    """Balls B(c R e_1, R) for every radius R and centre factor c."""
    out = []
    for r in radii:
        for c in center_factors:
            center = c * r if n == 1 else (c * r,) + (0.0,) * (n - 1)
            out.append(Ball(center, r))
    return out


DEFAULT_CENTER_FACTORS = (0.0, 0.5, 2.0, 10.0)
REFINED_CENTER_FACTORS = (0.0, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0)
# far centres let the |x_B|/R growth test reach its asymptotic regime
FAR_CENTER_FACTORS = (0.0, 0.5, 2.0, 10.0, 100.0, 1000.0)


def default_family(n: int = 1, per_decade: int = 2, lo: float = 1e-3, hi: float = 1e3,
                   centers: Sequence[float] = DEFAULT_CENTER_FACTORS) -> list:
    count = int(round(math.log10(hi / lo) * per_decade)) + 1
    return ball_family(np.geomspace(lo, hi, count), centers, n)


# -- region classification and example construction -----------------------------------

def _close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)


def classify_region(params: ParamSet, p_vec: ExponentVector) -> str:
    """Return ``"trivial"``, ``"boundary-excluded"``, ``"nontrivial"`` or
    ``"undetermined"`` (beta outside (0, min{mn, mn + delta}) and no
    triviality statement applies)."""
    n, m = params.n, params.m
    dt, d = params.delta_tilde, params.delta
    edge = params.beta - n * float(p_vec.inv_p)
    if _close(dt, d) and _close(dt, edge):
        return "boundary-excluded"
    if (dt > d and not _close(dt, d)) or (dt > edge and not _close(dt, edge)):
        return "trivial"
    if not (0 < params.beta < min(m * n, m * n + d)):
        return "undetermined"
    return "nontrivial"


def _q_values(params: ParamSet, p_vec: ExponentVector) -> list:
    n, m = params.n, params.m
    return [n * float(1 / p if p is not INF else 0) + (params.delta - params.beta) / m
            for p in p_vec]


def _n_over_dual(n, p_i) -> float:
    pd = dual(p_i)
    return 0.0 if pd is INF else n / float(pd)


def proof_recipe(params: ParamSet, p_vec: ExponentVector) -> PowerWeightRecipe:
    """Exponents for the delta_tilde < beta - mn branch (midpoints of the open intervals)."""
    n, m = params.n, params.m
    verdict = classify_region(params, p_vec)
    if verdict != "nontrivial":
        raise RegionViolation(_region_reason(params, p_vec, verdict))
    if not params.delta_tilde < params.beta - m * n:
        raise RegionViolation("proof-recipe needs delta_tilde < beta - mn")
    q = _q_values(params, p_vec)
    I1, I2 = p_vec.I1, p_vec.I2
    tau = [0.0] * m
    for i in I2:
        hi = _n_over_dual(n, p_vec.entries[i])
        lo = -q[i] if q[i] < 0 else 0.0
        tau[i] = 0.5 * (lo + hi)
    nu = math.fsum(tau[i] if q[i] >= 0 else tau[i] + q[i] for i in I2)
    tau_common = None
    if I1:
        cap = min(nu / len(I1), n + (params.delta - params.beta) / m)
        # with I2 empty nu = 0 and the interval is empty; tau = 0 is used
        tau_common = 0.5 * cap if cap > 0 else 0.0
        for i in I1:
            tau[i] = -tau_common
    eta = params.delta_tilde + math.fsum(tau) + n * float(p_vec.inv_p) - params.beta
    assert eta < 0, "recipe invariant: eta < 0"
    return PowerWeightRecipe(tuple(tau), eta, tuple(q), nu, tau_common, len(I1), "proof-recipe")


def _region_reason(params, p_vec, verdict) -> str:
    edge = params.beta - params.n * float(p_vec.inv_p)
    if verdict == "boundary-excluded":
        return "delta_tilde = delta = beta - n/p is excluded"
    if params.delta_tilde > params.delta:
        return "delta_tilde > delta"
    if params.delta_tilde > edge:
        return "delta_tilde > beta - n/p"
    return "beta outside (0, min{mn, mn + delta})"


def recipe_pair(recipe: PowerWeightRecipe, n: int = 1) -> WeightPair:
    return WeightPair(Weight.power(recipe.eta, n), tuple(Weight.power(t, n) for t in recipe.tau))


def search_box(params: ParamSet, p_vec: ExponentVector, rh_order: int | None = None) -> list:
    """Open intervals for each tau_i that keep every factor finite (and, with
    ``rh_order``, keep v_i^{-p_i'} in RH_{rh_order})."""
    n = params.n
    q = _q_values(params, p_vec)
    box = []
    for i, p_i in enumerate(p_vec):
        if p_i == 1:
            e = _kernel_decay(params, i)
            box.append((-max(e, 0.0), 0.0))
            continue
        hi = _n_over_dual(n, p_i)
        if rh_order:
            hi = hi / rh_order
        lo = max(0.0, -q[i])
        box.append((lo, hi))
    return box


def exponent_candidates(params: ParamSet, p_vec: ExponentVector, rh_order: int | None = None,
                        fractions: Sequence[float] = (0.5, 0.25, 0.75)) -> list:
    n = params.n
    box = search_box(params, p_vec, rh_order)
    q = _q_values(params, p_vec)
    out = []
    for f in fractions:
        tau = []
        for (lo, hi), p_i in zip(box, p_vec):
            if p_i == 1:
                tau.append(f * lo if f <= 0.5 else 0.0)
            else:
                tau.append(lo + f * (hi - lo))
        if any(not (lo <= t <= hi) for t, (lo, hi) in zip(tau, box)):
            continue
        if any(hi <= lo for (lo, hi), p_i in zip(box, p_vec) if p_i != 1):
            continue
        eta = params.delta_tilde + math.fsum(tau) + n * float(p_vec.inv_p) - params.beta
        if not -n < eta < n:
            continue
        nu = math.fsum(t if qi >= 0 else t + qi for t, qi, p_i in zip(tau, q, p_vec) if p_i != 1)
        out.append(PowerWeightRecipe(tuple(tau), eta, tuple(q), nu, None, len(p_vec.I1),
                                     "exponent-search"))
    return out


SEARCH_FAMILY = ball_family((1e-2, 1.0, 1e2), (0.0, 0.5, 1.0, 2.0, 10.0, 100.0, 1000.0))


def generate_power_example(params: ParamSet, p_vec: ExponentVector, strategy: str = "auto",
                           spec: QuadSpec = QuadSpec(), rh_order: int | None = None,
                           slope_tol: float = 0.05):
    """Return ``(WeightPair, PowerWeightRecipe)`` for parameters in the nontrivial region.

    ``strategy="proof-recipe"`` follows the explicit construction for
    delta_tilde < beta - mn; ``"exponent-search"`` scans power exponents
    inside the admissible box and keeps the candidate whose H_m constant is
    finite and flat; ``"auto"`` picks by branch.
    """
    verdict = classify_region(params, p_vec)
    if verdict != "nontrivial":
        raise RegionViolation(_region_reason(params, p_vec, verdict))
    if strategy == "auto":
        strategy = ("proof-recipe" if params.delta_tilde < params.beta - params.m * params.n
                    and rh_order is None else "exponent-search")
    if strategy == "proof-recipe":
        recipe = proof_recipe(params, p_vec)
        return recipe_pair(recipe, params.n), recipe
    if strategy != "exponent-search":
        raise ValueError(f"unknown strategy {strategy!r}")
    family = [b for b in SEARCH_FAMILY] if params.n == 1 else ball_family(
        (1e-2, 1.0, 1e2), (0.0, 0.5, 1.0, 2.0, 10.0, 100.0), params.n)
    best = None
    for cand in exponent_candidates(params, p_vec, rh_order):
        pair = recipe_pair(cand, params.n)
        try:
            rep = hm_class_constant(pair, params, p_vec, family, spec)
        except NonIntegrableTail:
            continue
        if not rep.bounded(slope_tol):
            continue
        # flat candidates first; slowly converging ones rank by their extrapolated limit
        flat = rep.center_slope <= slope_tol
        score = (0, max(rep.center_slope, 0.0), rep.sup) if flat else (1, 0.0, rep.center_limit)
        if best is None or score < best[0]:
            best = (score, pair, cand)
    if best is None:
        raise SearchFailure("no bounded power-weight candidate in the admissible box")
    return best[1], best[2]


# -- one-weight rigidity ----------------------------------------------------------------

@dataclass
class RigidityReport:
    slope: float
    radii: list
    values: list
    tolerance: float

    @property
    def consistent(self) -> bool:
        return abs(self.slope) <= self.tolerance


def rigidity_quantity(v: Sequence[Weight], params: ParamSet, p_vec: ExponentVector, ball: Ball,
                      spec: QuadSpec = QuadSpec()) -> float:
    """|B|^{-dt/n + beta/n - 1/p} (avg (prod v^-1)^xi)^{1/xi} / avg prod v^-1."""
    xi_val = float(require_xi(p_vec, params.m))
    n = params.n
    expo = -params.delta_tilde / n + params.beta / n - float(p_vec.inv_p)
    u = product_weight(list(v)).pow(-1.0)
    return ball.volume ** expo * rh_ratio(u, xi_val, ball, spec)


def related_weight_rigidity(v: Sequence[Weight], params: ParamSet, p_vec: ExponentVector,
                            radii: Sequence[float], center_factors=(0.0, 0.5, 2.0),
                            spec: QuadSpec = QuadSpec(), tolerance: float = 0.02) -> RigidityReport:
    """Fitted slope (against log|B|) of the per-radius max of the rigidity quantity."""
    xi_val = require_xi(p_vec, params.m)
    if not xi_val > 1:
        raise XiUndefined(f"xi = {xi_val} is not > 1")
    rows = []
    for b in ball_family(radii, center_factors, params.n):
        rows.append((b, rigidity_quantity(v, params, p_vec, b, spec)))
    rs, maxima = per_radius_max(rows)
    slope = loglog_slope([Ball((0.0,) * params.n, r).volume for r in rs], maxima)
    return RigidityReport(slope, list(rs), list(maxima), tolerance)
