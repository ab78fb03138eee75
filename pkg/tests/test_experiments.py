import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mlfrac.core import Ball, ExponentVector, ParamSet, XiUndefined
from mlfrac.experiments import (PANELS, ExperimentConfig, FamilySpec, build_function, build_pair, build_symbol,
                                 SURROGATE_RULE, canonical_config, commutator_surrogate, equivalence_check, region_map,
                                 related_power_weights, rigidity_scan, verify_boundedness)
from mlfrac.operators import KernelSpec, SymbolVector, sum_commutator
from mlfrac.weights import HypothesisViolation, Weight, WeightPair, classify_region, proof_recipe, recipe_pair

SMALL = FamilySpec(r_lo=1e-2, r_hi=10.0, per_decade=1, centers=2, relative=1, c_hi=10.0)


def test_family_sizes_and_superset():
    fam = FamilySpec()
    base, refined = fam.balls(0), fam.balls(0, refined=True)
    assert len(base) >= 100
    keys = {(b.center, b.radius) for b in refined}
    assert all((b.center, b.radius) in keys for b in base)
    assert len(refined) > 2 * len(base)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_family_is_seeded(seed):
    a = [(b.center, b.radius) for b in SMALL.balls(seed)]
    b = [(b.center, b.radius) for b in SMALL.balls(seed)]
    assert a == b
    assert all(r > 0 for _, r in a)


def test_builders_reject_unknown_kinds():
    with pytest.raises(ValueError):
        build_symbol({"kind": "wavy"})
    with pytest.raises(ValueError):
        build_function({"kind": "wavy"})
    with pytest.raises(KeyError):
        build_symbol({"kind": "power"})


def test_constant_pair_spec():
    pair, rec = build_pair({"kind": "constant"}, ParamSet(2, 1, 0.6, 0.1, 0.05, 0.7), ExponentVector([4, 4]))
    assert rec is None and pair.w.exponent == 0


def test_surrogate_tracks_operator():
    cfg = canonical_config("sum")
    b = SymbolVector([build_symbol(s) for s in cfg.symbols])
    f = [build_function(s) for s in cfg.functions]
    K = KernelSpec.standard(0.6, 2)
    F = lambda x: sum_commutator(b, f, x, "all", K, rule=SURROGATE_RULE)
    sur = commutator_surrogate(F, f, list(b), 2.0)
    # only the two panels touching the symbol singularity at 0 stay unresolved
    assert sur.unresolved == 2
    assert np.min(np.diff(sur.breaks)) < 1e-6
    for x in (-1.7, -0.7, 0.013, 0.5, 1.49, 1e-7, -1e-7):
        assert float(sur(x)) == pytest.approx(F(x), rel=1e-5, abs=1e-7)


def _config(kind, symbols, functions, **kw):
    base = canonical_config(kind, family=SMALL)
    return ExperimentConfig(base.params, base.p_vec, base.pair, symbols, functions, SMALL,
                            commutator_kind=kind, **kw)


def test_verify_zero_input_skips_rows():
    cfg = canonical_config("sum")
    funcs = [cfg.functions[0], {"kind": "zero"}]
    table = verify_boundedness(_config("sum", cfg.symbols, funcs))
    assert table.skipped == len(table.rows) > 0
    assert all(r["ratio"] is None for r in table.rows)
    assert table.sup_ratio == 0.0


def test_verify_constant_symbols_vanish():
    cfg = canonical_config("sum")
    consts = [{"kind": "constant", "value": 1.0, "delta": 0.1}] * 2
    table = verify_boundedness(_config("sum", consts, cfg.functions))
    assert table.sup_ratio_refined <= 1e-8 * table.rhs
    assert table.passed


def test_verify_rejects_bad_parameters():
    cfg = canonical_config("sum")
    bad = ExperimentConfig(cfg.params.with_(beta=0.9), cfg.p_vec, {"kind": "constant"}, cfg.symbols,
                           cfg.functions, SMALL)
    with pytest.raises(HypothesisViolation):
        verify_boundedness(bad)


def test_equivalence_rejects_nondoubling_weight():
    params = ParamSet(2, 1, 0.5, 0.1, -1.5, 0.7)
    decay = Weight.custom(lambda y: np.exp(-np.abs(y)), label="exp(-|y|)")
    pair = WeightPair(Weight.constant(), (decay, Weight.constant()))
    balls = [Ball(0.0, r) for r in (1.0, 10.0)]
    with pytest.raises(HypothesisViolation, match="doubling"):
        equivalence_check(pair, params, ExponentVector([4, 4]), balls)


def test_region_map_matches_classifier():
    panel = PANELS["beta>delta"]
    inv_p = [0.1, 0.3, 0.5, 0.7, 0.9]
    dts = [0.0, 0.2, 0.4, 0.5, 0.6, 0.8]
    grid = region_map(panel, inv_p, dts, empirical=False)
    for cell in grid.cells:
        params = ParamSet(2, 1, 0.5, panel["delta"], cell.delta_tilde, panel["beta"])
        assert cell.analytic == classify_region(params, ExponentVector.uniform(2, cell.inv_p))
    kinds = {c.analytic for c in grid.cells}
    assert {"trivial", "nontrivial", "boundary-excluded"} <= kinds
    assert all(c.empirical == "not-attempted" for c in grid.cells)


def test_region_map_edge_cells_bounded():
    # on delta_tilde = beta - n/p below delta, the generated example is bounded
    grid = region_map(PANELS["beta>delta"], [0.6, 0.8], [0.4, 0.2])
    edge = [c for c in grid.cells if math.isclose(c.delta_tilde, 1.0 - c.inv_p)]
    assert len(edge) == 2 and all(c.empirical == "bounded" for c in edge)
    assert all(c.empirical in ("bounded", "not-attempted") for c in grid.cells)


def test_region_map_nontrivial_cells_bounded():
    grid = region_map(PANELS["beta>delta"], [0.1, 0.3, 0.5, 0.7, 0.9], [0.0, 0.2, 0.4, 0.6, 0.8])
    for c in grid.cells:
        assert c.empirical == ("bounded" if c.analytic == "nontrivial" else "not-attempted"), c


RIGID = ParamSet(2, 1, 0.6, 0.5, 0.0, 1.5)
RIGID_P = ExponentVector(["3/2", "3/2"])


def test_rigidity_constant_weights_exact():
    table = rigidity_scan([Weight.constant()] * 2, RIGID, RIGID_P)
    assert [r.slope for r in table.rows] == pytest.approx([0.2, 0.0, -0.2], abs=1e-12)
    assert [r.expected for r in table.rows] == pytest.approx([0.2, 0.0, -0.2])
    assert table.passed and table.rh_xi == pytest.approx(1.0)


@pytest.mark.parametrize("fraction", [0.1, 0.25, 0.5])
def test_rigidity_related_powers(fraction):
    v = related_power_weights(RIGID, RIGID_P, fraction)
    table = rigidity_scan(v, RIGID, RIGID_P)
    flat = [r for r in table.rows if r.offset == 0][0]
    assert abs(flat.slope) <= 0.02
    assert all(abs(r.slope) >= 0.15 for r in table.rows if r.offset != 0)
    assert math.isfinite(table.rh_xi) and table.passed


def test_rigidity_requires_xi_above_one():
    with pytest.raises(XiUndefined):
        rigidity_scan([Weight.constant()] * 2, RIGID, ExponentVector([4, 4]))


def test_equivalence_band_for_recipe_pair():
    params = ParamSet(2, 1, 0.5, 0.1, -1.5, 0.7)
    pv = ExponentVector([4, 4])
    pair = recipe_pair(proof_recipe(params, pv))
    balls = [Ball(c * r, r) for r in np.geomspace(1e-2, 1e2, 5) for c in (0.0, 0.5, 2.0, 10.0)]
    rep = equivalence_check(pair, params, pv, balls)
    assert rep.passed, rep.ratio
    assert all(h["pass"] for h in rep.hypotheses)


def test_equivalence_constant_weights_finite():
    params = ParamSet(1, 1, 0.5, 0.6, 0.1, 0.5)
    pair = WeightPair.related_pair([Weight.constant()])
    balls = [Ball(0.0, r) for r in (0.1, 1.0, 10.0)]
    rep = equivalence_check(pair, params, ExponentVector([2]), balls)
    assert math.isfinite(rep.ratio)


def test_config_serialization_roundtrip_keys():
    d = canonical_config("product").to_dict()
    assert d["params"]["beta"] == pytest.approx(0.8)
    assert d["p"] == ["4", "4"]
    assert d["commutator_kind"] == "product"
