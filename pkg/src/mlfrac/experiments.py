"""Verification harnesses: commutator boundedness, region maps, rigidity and equivalence.

Every harness refuses to report a verdict when one of its hypotheses fails
and raises :class:`~mlfrac.weights.HypothesisViolation` naming it.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from mlfrac.core import (INF, Ball, ExponentVector, ParamSet, XiUndefined, as_exponent, dual,
                         require_xi, to_float, validate_params)
from mlfrac.norms import OscillationRule, oscillation, weighted_lp_norm
from mlfrac.operators import (KernelSpec, Symbol, SymbolVector, TestFunction, product_commutator_direct,
                              sum_commutator, t_alpha)
from mlfrac.quadrature import GradedRule, NonIntegrableTail, PiecewiseChebyshev, QuadSpec
from mlfrac.weights import (FAR_CENTER_FACTORS, SEARCH_FAMILY, HypothesisViolation, RegionViolation, SearchFailure, Weight,
                            WeightPair, ball_family, classify_region, default_family, doubling_constant,
                            generate_power_example, hm_class_constant, inverse_mass, product_weight,
                            rh_constant, related_weight_rigidity, sup_report)


# operator accuracy (about 2e-8 relative) well below the tabulation tolerance
SURROGATE_RULE = GradedRule(order=8, levels=8, ratio=0.2)


# -- specs ---------------------------------------------------------------------------------

def build_symbol(spec: dict) -> Symbol:
    kind = spec.get("kind", "power")
    if kind == "constant":
        return Symbol.constant(float(spec.get("value", 1.0)), float(spec.get("delta", 0.5)))
    if kind == "coordinate":
        return Symbol.coordinate()
    if kind == "power":
        return Symbol.power(float(spec["delta"]), float(spec.get("center", 0.0)))
    if kind == "clipped":
        return Symbol.clipped(float(spec["lo"]), float(spec["hi"]), float(spec["delta"]))
    raise ValueError(f"unknown symbol kind {kind!r}")


def build_function(spec: dict) -> TestFunction:
    kind = spec.get("kind", "bump")
    c, r = float(spec.get("center", 0.0)), float(spec.get("radius", 1.0))
    if kind == "indicator":
        return TestFunction.indicator(c, r)
    if kind == "bump":
        return TestFunction.bump(c, r, float(spec.get("height", 1.0)))
    if kind == "gaussian":
        return TestFunction.gaussian(c, r, float(spec.get("width", 0.5)))
    if kind == "zero":
        return TestFunction.zero(c, r)
    raise ValueError(f"unknown function kind {kind!r}")


def build_pair(spec: dict, params: ParamSet, p_vec: ExponentVector, quad: QuadSpec = QuadSpec()):
    """Return ``(WeightPair, recipe or None)`` from a pair spec."""
    kind = spec.get("kind", "recipe")
    if kind == "recipe":
        rh = spec.get("rh_order")
        return generate_power_example(params, p_vec, spec.get("strategy", "auto"), quad,
                                      int(rh) if rh is not None else None)
    if kind == "power":
        v = tuple(Weight.power(float(a), params.n) for a in spec["v"])
        return WeightPair(Weight.power(float(spec["w"]), params.n), v), None
    if kind == "related":
        return WeightPair.related_pair([Weight.power(float(a), params.n) for a in spec["v"]]), None
    if kind == "constant":
        one = Weight.constant(params.n)
        return WeightPair(one, (one,) * params.m, True), None
    raise ValueError(f"unknown pair kind {kind!r}")


@dataclass(frozen=True)
class FamilySpec:
    """Seeded ball family: a radius grid times random centres.

    Radii are ``10^(log10(r_lo) + j/per_decade)``.  Each radius is combined
    with the origin, ``centers`` absolute centres (log-uniform magnitude in
    [c_lo, c_hi], random sign) and ``relative`` centres t R with t uniform in
    [-t_max, t_max].  The refined family doubles the radius grid and both
    centre counts, and contains the base family.
    """

    r_lo: float = 1e-5
    r_hi: float = 1e2
    per_decade: int = 3
    centers: int = 12
    relative: int = 6
    c_lo: float = 1e-3
    c_hi: float = 1e2
    t_max: float = 3.0
    include_origin: bool = True

    def radii(self, refined: bool = False) -> list:
        k = 2 * self.per_decade if refined else self.per_decade
        lo = math.log10(self.r_lo)
        count = int(round((math.log10(self.r_hi) - lo) * k))
        return [10.0 ** (lo + j / k) for j in range(count + 1)]

    def _draws(self, seed: int):
        rng = np.random.default_rng([int(seed), 0xBA11])
        total = 2 * self.centers
        signs = rng.choice((-1.0, 1.0), size=total)
        mags = 10.0 ** rng.uniform(math.log10(self.c_lo), math.log10(self.c_hi), size=total)
        rel = rng.uniform(-self.t_max, self.t_max, size=2 * self.relative)
        return [float(s * m) for s, m in zip(signs, mags)], [float(t) for t in rel]

    def balls(self, seed: int, refined: bool = False) -> list:
        absolute, rel = self._draws(seed)
        if not refined:
            absolute, rel = absolute[: self.centers], rel[: self.relative]
        out = []
        for r in self.radii(refined):
            cs = ([0.0] if self.include_origin else []) + absolute + [t * r for t in rel]
            out.extend(Ball(c, r) for c in cs)
        return out

    def describe(self, seed: int, refined: bool = False) -> str:
        r = self.radii(refined)
        k = 2 if refined else 1
        return (f"radii {len(r)} in [{r[0]:g},{r[-1]:g}] x centres ({k * self.centers} absolute, "
                f"{k * self.relative} relative{', origin' if self.include_origin else ''}; seed {seed})")


@dataclass
class ExperimentConfig:
    params: ParamSet
    p_vec: ExponentVector
    pair: dict = field(default_factory=lambda: {"kind": "recipe", "strategy": "auto"})
    symbols: list = field(default_factory=list)
    functions: list = field(default_factory=list)
    family: FamilySpec = field(default_factory=FamilySpec)
    seed: int = 0
    quad: QuadSpec = field(default_factory=QuadSpec)
    commutator_kind: str = "sum"
    refine_tol: float = 0.10
    slope_tol: float = 0.05
    surrogate_tol: float = 1e-6
    operator_rule: GradedRule = field(default_factory=lambda: SURROGATE_RULE)

    def to_dict(self) -> dict:
        p = self.params
        return {
            "params": {"m": p.m, "n": p.n, "alpha": p.alpha, "delta": p.delta,
                       "delta_tilde": p.delta_tilde, "beta": p.beta, "gamma": p.gamma,
                       "beta_split": list(p.beta_split)},
            "p": [str(e) for e in self.p_vec],
            "pair": dict(self.pair), "symbols": list(self.symbols), "functions": list(self.functions),
            "family": asdict(self.family), "seed": self.seed,
            "quad": {"rel_tol": self.quad.rel_tol, "abs_tol": self.quad.abs_tol},
            "commutator_kind": self.commutator_kind, "refine_tol": self.refine_tol,
            "slope_tol": self.slope_tol, "surrogate_tol": self.surrogate_tol,
            "operator_rule": asdict(self.operator_rule),
        }


@dataclass
class VerdictTable:
    rows: list
    sup_ratio: float
    sup_ratio_refined: float
    stability: float
    slope_low: float
    slope_high: float
    center_slope: float
    passed: bool
    rhs: float
    hypotheses: list = field(default_factory=list)
    family: str = ""
    skipped: int = 0
    meta: dict = field(default_factory=dict)

    columns = ("family", "center", "radius", "lhs", "rhs", "ratio")

    def summary(self) -> dict:
        return {"sup_ratio": self.sup_ratio, "sup_ratio_refined": self.sup_ratio_refined,
                "stability": self.stability, "slope_low": self.slope_low, "slope_high": self.slope_high,
                "center_slope": self.center_slope, "passed": self.passed, "rhs": self.rhs,
                "skipped": self.skipped, "family": self.family, "hypotheses": self.hypotheses,
                **self.meta}


# -- boundedness of the commutators -------------------------------------------------------------

def _operator(kind: str, b: SymbolVector, f: list, K: KernelSpec, rule: GradedRule = SURROGATE_RULE):
    if kind == "sum":
        return lambda x: sum_commutator(b, f, x, "all", K, rule=rule)
    if kind == "product":
        return lambda x: product_commutator_direct(b, f, x, K, rule=rule)
    if kind == "none":
        return lambda x: t_alpha(f, x, K, rule=rule)
    raise ValueError(f"unknown commutator kind {kind!r}")


def check_hypotheses(config: ExperimentConfig, pair: WeightPair) -> list:
    """Check the hypotheses behind the boundedness runs; raise on the first failure."""
    p, pv = config.params, config.p_vec
    out = []
    mode = config.commutator_kind if config.commutator_kind in ("sum", "product") else "weight"
    rep = validate_params(p, mode, pv)
    out.append({"hypothesis": f"parameters ({mode})", "pass": rep.ok, "detail": ",".join(rep.failures)})
    if not rep.ok:
        raise HypothesisViolation(f"parameter hypotheses failed: {', '.join(rep.failures)}")
    try:
        hm = hm_class_constant(pair, p, pv, SEARCH_FAMILY, config.quad)
        ok = hm.bounded(config.slope_tol)
        detail = f"sup={hm.sup:.6g}"
    except NonIntegrableTail as exc:
        ok, detail = False, str(exc)
    out.append({"hypothesis": "pair in H_m(p, beta, delta_tilde)", "pass": ok, "detail": detail})
    if not ok:
        raise HypothesisViolation(f"pair in H_m(p, beta, delta_tilde) failed: {detail}")
    for i in pv.I2_finite:
        pd = float(dual(pv.entries[i]))
        c = rh_constant(pair.v[i].pow(-pd), p.m, SEARCH_FAMILY, config.quad)
        ok = math.isfinite(c)
        out.append({"hypothesis": f"v_{i + 1}^(-p_{i + 1}') in RH_m", "pass": ok, "detail": f"C={c:.6g}"})
        if not ok:
            raise HypothesisViolation(f"v_{i + 1}^(-p_{i + 1}') in RH_{p.m} failed")
    return out


def commutator_surrogate(F, functions: Sequence[TestFunction], symbols: Sequence[Symbol], extent: float,
                         rel_tol: float = 1e-6, order: int = 10) -> PiecewiseChebyshev:
    """Tabulate ``F`` on [-extent, extent].

    Initial panels are dyadic around every irregular point of the inputs
    (deeper around singular points) and around the ends of their support
    hull, so that adaptive splitting rarely has to chase an endpoint.
    """
    points = sorted({p for f in functions for p in f.breakpoints} | {k for b in symbols for k in b.kinks})
    singular = sorted({s for b in symbols for s in b.singular} | {s for f in functions for s in f.singular})
    hull = (min(f.a for f in functions), max(f.b for f in functions))
    k_hi = math.ceil(math.log2(2 * extent)) + 1
    breaks = set(points)
    # offsets 4^j: ordinary points, singular points (deeper), support hull
    for pts, k_lo, k_top in ((points, -16, 2), (singular, -24, k_hi), (hull, -2, k_hi)):
        for c in pts:
            breaks |= {c + sg * 2.0 ** k for k in range(k_lo, k_top, 2) for sg in (-1, 1)}
    return PiecewiseChebyshev.build(F, -extent, extent, sorted(breaks), singular, order=order,
                                    rel_tol=rel_tol, min_width=1e-9)


def verify_boundedness(config: ExperimentConfig, pair: WeightPair | None = None) -> VerdictTable:
    """Sup over balls of (w^{-1}(B)|B|^{dt/n})^{-1} osc(T_b f, B) / prod ||f_i v_i||_{p_i}.

    ``T_b f`` is tabulated once on the hull of the refined family and every
    ball oscillation is integrated from the tabulation.
    """
    p, pv = config.params, config.p_vec
    if p.n != 1:
        raise NotImplementedError("boundedness runs are implemented for n = 1")
    if pair is None:
        pair, _ = build_pair(config.pair, p, pv, config.quad)
    hyps = check_hypotheses(config, pair)
    b = SymbolVector([build_symbol(s) for s in config.symbols])
    f = [build_function(s) for s in config.functions]
    if len(f) != p.m or (config.commutator_kind != "none" and len(b) != p.m):
        raise ValueError("need m symbols and m functions")
    rhs = math.prod(weighted_lp_norm(fi, vi, pi, (fi.a, fi.b), points=fi.breakpoints)
                    for fi, vi, pi in zip(f, pair.v, pv))
    base = config.family.balls(config.seed)
    refined = config.family.balls(config.seed, refined=True)
    base_keys = {(bb.center, bb.radius) for bb in base}
    extent = max(abs(bb.center[0]) + bb.radius for bb in refined)
    K = KernelSpec.standard(p.alpha, p.m)
    F = _operator(config.commutator_kind, b, f, K, config.operator_rule)
    sur = commutator_surrogate(F, f, list(b), extent, config.surrogate_tol)
    rule = OscillationRule(order=16)
    rows, skipped = [], 0
    for ball in refined:
        if rhs == 0:
            skipped += 1
            rows.append({"family": "base" if (ball.center, ball.radius) in base_keys else "refined",
                         "center": ball.center[0], "radius": ball.radius, "lhs": 0.0, "rhs": 0.0,
                         "ratio": None})
            continue
        osc = oscillation(sur, ball, config.quad, rule=rule, breaks=sur.breaks)
        inv = inverse_mass(pair.w, ball, config.quad)
        lhs = 0.0 if not math.isfinite(inv) else osc / (inv * ball.volume ** (p.delta_tilde / p.n))
        rows.append({"family": "base" if (ball.center, ball.radius) in base_keys else "refined",
                     "center": ball.center[0], "radius": ball.radius, "lhs": lhs, "rhs": rhs,
                     "ratio": lhs / rhs})
    ratios_base = [r["ratio"] for r in rows if r["family"] == "base" and r["ratio"] is not None]
    ratios_all = [r["ratio"] for r in rows if r["ratio"] is not None]
    sup_b = max(ratios_base, default=0.0)
    sup_r = max(ratios_all, default=0.0)
    stability = (sup_r - sup_b) / sup_r if sup_r > 0 else 0.0
    if ratios_all and sup_r > 0:
        rep = sup_report([(Ball(r["center"], r["radius"]), max(r["ratio"], 1e-300))
                          for r in rows if r["ratio"] is not None], p.n)
        lo, hi, cs = rep.slope_low, rep.slope_high, rep.center_slope
        bounded = rep.bounded(config.slope_tol, one_sided=True)
    else:
        lo = hi = cs = 0.0
        bounded = True
    passed = math.isfinite(sup_r) and stability <= config.refine_tol and bounded
    meta = {"surrogate_evaluations": sur.evaluations, "surrogate_panels": len(sur.coefs),
            "surrogate_unresolved": sur.unresolved, "base_balls": len(base), "refined_balls": len(refined),
            "kind": config.commutator_kind}
    return VerdictTable(rows, sup_b, sup_r, stability, lo, hi, cs, passed, rhs, hyps,
                        config.family.describe(config.seed, True), skipped, meta)


# -- region map ---------------------------------------------------------------------------

PANELS = {
    "beta>delta": {"m": 2, "n": 1, "delta": 0.5, "beta": 1.0},
    "beta=delta": {"m": 2, "n": 1, "delta": 0.5, "beta": 0.5},
    "beta<delta": {"m": 2, "n": 1, "delta": 0.5, "beta": 0.25},
}


@dataclass
class RegionCell:
    inv_p: float
    delta_tilde: float
    analytic: str
    empirical: str = "not-attempted"
    sup: float | None = None
    strategy: str | None = None
    tau: list | None = None
    eta: float | None = None
    detail: str = ""


@dataclass
class RegionGrid:
    panel: dict
    cells: list

    columns = ("inv_p", "delta_tilde", "analytic", "empirical", "sup", "strategy", "eta", "detail")

    def rows(self) -> list:
        return [{k: getattr(c, k) for k in self.columns} for c in self.cells]


def region_map(panel: dict, inv_p_values: Sequence[float], delta_t_values: Sequence[float],
               empirical: bool = True, family: Sequence[Ball] | None = None,
               quad: QuadSpec = QuadSpec(), slope_tol: float = 0.05) -> RegionGrid:
    """Classify every (1/p, delta_tilde) cell and, where nontrivial, build and test an example.

    ``panel`` holds m, n, delta, beta (and optionally alpha); exponents are
    taken equal, p_i = m p.
    """
    m, n = int(panel["m"]), int(panel["n"])
    base = ParamSet(m, n, float(panel.get("alpha", 0.5)), float(panel["delta"]), 0.0, float(panel["beta"]))
    fam = list(family) if family is not None else default_family(n, 1, 1e-3, 1e3, FAR_CENTER_FACTORS)
    cells = []
    for ip in inv_p_values:
        pv = ExponentVector.uniform(m, as_exponent(float(ip)))
        for dt in delta_t_values:
            params = base.with_(delta_tilde=float(dt))
            verdict = classify_region(params, pv)
            cell = RegionCell(float(ip), float(dt), verdict)
            if verdict == "nontrivial" and empirical:
                try:
                    pair, rec = generate_power_example(params, pv, "auto", quad)
                    rep = hm_class_constant(pair, params, pv, fam, quad)
                    cell.empirical = "bounded" if rep.bounded(slope_tol) else "unbounded"
                    cell.sup, cell.strategy = rep.sup, rec.strategy
                    cell.tau, cell.eta = list(rec.tau), rec.eta
                except SearchFailure as exc:
                    cell.empirical, cell.detail = "search-failure", str(exc)
                except (RegionViolation, NonIntegrableTail) as exc:
                    cell.empirical, cell.detail = "error", str(exc)
            cells.append(cell)
    return RegionGrid(dict(panel), cells)


# -- rigidity --------------------------------------------------------------------------------

def related_power_weights(params: ParamSet, p_vec: ExponentVector, fraction: float = 0.25) -> list:
    """Power weights v_i = |x|^tau_i with sum tau = fraction * n / xi, so prod v^-1 is in RH_xi."""
    xi_val = float(require_xi(p_vec, params.m))
    total = fraction * params.n / xi_val
    return [Weight.power(total / params.m, params.n) for _ in range(params.m)]


@dataclass
class RigidityRow:
    offset: float
    delta_tilde: float
    slope: float
    expected: float | None
    consistent: bool


@dataclass
class RigidityTable:
    rows: list
    rh_xi: float | None
    passed: bool
    label: str = ""

    columns = ("offset", "delta_tilde", "slope", "expected", "consistent")


def rigidity_scan(v: Sequence[Weight], params: ParamSet, p_vec: ExponentVector,
                  radii: Sequence[float] = tuple(10.0 ** k for k in range(-3, 4)),
                  offsets: Sequence[float] = (-0.2, 0.0, 0.2), tolerance: float = 0.02,
                  separation: float = 0.15, quad: QuadSpec = QuadSpec(), label: str = "") -> RigidityTable:
    """Slope of the one-weight quantity for delta_tilde = beta - n/p + offset.

    Passes when the slope is flat (|s| <= tolerance) exactly at offset 0 and
    steep (|s| >= separation) elsewhere; also reports the RH_xi constant of
    prod v_i^{-1}.
    """
    xi_val = require_xi(p_vec, params.m)
    if not xi_val > 1:
        raise XiUndefined(f"xi = {xi_val} is not > 1")
    n = params.n
    edge = params.beta - n * float(p_vec.inv_p)
    constant = all(w.is_power and w.exponent == 0 for w in v)
    rows = []
    for off in offsets:
        pr = params.with_(delta_tilde=edge + off)
        rep = related_weight_rigidity(v, pr, p_vec, radii, spec=quad, tolerance=tolerance)
        expected = -off / n if constant else None
        ok = rep.consistent if off == 0 else abs(rep.slope) >= separation
        rows.append(RigidityRow(off, edge + off, rep.slope, expected, ok))
    u = product_weight(list(v)).pow(-1.0)
    rh = rh_constant(u, xi_val, ball_family(radii, (0.0, 0.5, 2.0, 10.0), n), quad)
    passed = all(r.consistent for r in rows) and math.isfinite(rh)
    return RigidityTable(rows, rh, passed, label)


# -- equivalence of the full and global conditions --------------------------------------------------

@dataclass
class EquivalenceReport:
    full_sup: float
    global_sup: float
    ratio: float
    band: tuple
    passed: bool
    hypotheses: list


def equivalence_check(pair: WeightPair, params: ParamSet, p_vec: ExponentVector, balls: Sequence[Ball],
                      band: tuple = (1.0, 10.0), cap: float = 1e4, quad: QuadSpec = QuadSpec()) -> EquivalenceReport:
    """Compare sup of the full H_m left-hand side with the global one.

    Hypotheses: v_i^{-1} in RH_oo for p_i = 1 and v_i^{-p_i'} doubling for
    p_i > 1, each checked on ``balls`` against ``cap``.
    """
    hyps = []
    for i, p_i in enumerate(p_vec):
        if p_i == 1:
            c = rh_constant(pair.v[i].pow(-1.0), INF, balls, quad)
            name = f"v_{i + 1}^-1 in RH_oo"
        else:
            pd = dual(p_i)
            u = pair.v[i].pow(-float(pd)) if pd is not INF else Weight.constant(params.n)
            c = doubling_constant(u, balls, quad)
            name = f"v_{i + 1}^(-p_{i + 1}') doubling"
        ok = math.isfinite(c) and c <= cap
        hyps.append({"hypothesis": name, "pass": ok, "detail": f"C={c:.6g}"})
        if not ok:
            raise HypothesisViolation(f"{name} failed (constant {c:.6g})")
    full = hm_class_constant(pair, params, p_vec, balls, quad, "full").sup
    glob = hm_class_constant(pair, params, p_vec, balls, quad, "global").sup
    ratio = full / glob if glob > 0 else math.inf
    return EquivalenceReport(full, glob, ratio, tuple(band), band[0] <= ratio <= band[1], hyps)


def canonical_config(kind: str = "sum", seed: int = 0, family: FamilySpec | None = None) -> ExperimentConfig:
    """m = 2, n = 1, alpha = 0.6, delta = 0.1, p = (4, 4), delta_tilde = 0.05, beta = alpha_tilde."""
    alpha, delta, m = 0.6, 0.1, 2
    beta = alpha + delta if kind == "sum" else alpha + m * delta
    params = ParamSet(m, 1, alpha, delta, 0.05, beta)
    return ExperimentConfig(
        params=params, p_vec=ExponentVector([4, 4]),
        pair={"kind": "recipe", "strategy": "auto", "rh_order": m},
        symbols=[{"kind": "power", "delta": delta}] * m,
        functions=[{"kind": "bump", "center": 0.0, "radius": 1.0},
                   {"kind": "bump", "center": 0.5, "radius": 1.0}],
        family=family or FamilySpec(), seed=seed, commutator_kind=kind)
