"""Command-line entry point: ``mlfrac <subcommand> --config run.yaml --out results/``.

One YAML file describes one reproducible run.  Every subcommand writes its
table as CSV and/or JSON plus a ``manifest.json``; failures write
``error.json`` and exit with

    0  pass
    1  verdict fail (including a failed hypothesis check)
    2  configuration error (with the offending field path)
    3  numerical failure (non-integrable tail, quadrature budget, empty search)
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np
import yaml

from mlfrac import __version__
from mlfrac.core import INF, Ball, ExponentVector, ParamSet, XiUndefined, as_exponent
from mlfrac.experiments import (PANELS, ExperimentConfig, FamilySpec, build_function, build_pair, build_symbol,
                                region_map, related_power_weights, rigidity_scan, verify_boundedness)
from mlfrac.operators import (KernelSpec, SymbolVector, product_commutator_direct, sum_commutator, t_alpha)
from mlfrac.quadrature import GradedRule, NonIntegrableTail, QuadratureError, QuadSpec
from mlfrac.weights import (FAR_CENTER_FACTORS, HypothesisViolation, RegionViolation, SearchFailure, Weight,
                            default_family, doubling_constant, generate_power_example, hm_class_constant,
                            rh_constant)

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3
COMMANDS = ("check-weight", "gen-example", "region-map", "eval-operator", "verify", "rigidity", "selftest")


class ConfigError(ValueError):
    """Malformed configuration; ``path`` locates the field (``params.alpha``, ``symbols[1].kind``)."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.message = message


# -- number rendering ----------------------------------------------------------------------

def render_number(x) -> str:
    """17 significant digits; infinities and NaN become explicit tokens."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "divergent"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _cell(v) -> str:
    if isinstance(v, (float, int, np.floating, np.integer, bool)) or v is None:
        return render_number(v)
    if isinstance(v, (list, tuple)):
        return ";".join(_cell(u) for u in v)
    return str(v)


def jsonable(obj):
    """Recursively replace non-finite floats by tokens and numpy scalars by Python ones."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "divergent"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if obj is INF:
        return "inf"
    if isinstance(obj, Ball):
        return {"center": list(obj.center), "radius": obj.radius}
    return obj if obj is None or isinstance(obj, str) else str(obj)


def csv_text(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def emit(rows: Sequence[dict], columns: Sequence[str], summary: dict, out_dir: Path, stem: str,
         fmt: str = "both") -> list:
    """Write ``stem.csv`` (rows) and/or ``stem.json`` (summary plus rows); return the file names."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("csv", "both"):
        (out_dir / f"{stem}.csv").write_text(csv_text(rows, columns), encoding="utf-8")
        written.append(f"{stem}.csv")
    if fmt in ("json", "both"):
        payload = {"summary": summary, "columns": list(columns), "rows": list(rows)}
        (out_dir / f"{stem}.json").write_text(json_text(payload), encoding="utf-8")
        written.append(f"{stem}.json")
    return written


# -- manifest ------------------------------------------------------------------------------

@dataclass
class RunManifest:
    command: str
    config_path: str
    config_hash: str
    seed: int
    version: str
    started: str
    finished: str = ""
    exit_code: int | None = None
    outputs: list = field(default_factory=list)
    threads: int = 1

    def write(self, out_dir: Path) -> None:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        (out_dir / "manifest.json").write_text(json_text(data), encoding="utf-8")


def config_hash(path: str | os.PathLike) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


# -- config parsing --------------------------------------------------------------------------

_MISSING = object()


def _get(d: dict, key: str, path: str, kind: Callable | tuple = float, default: Any = _MISSING):
    p = f"{path}.{key}" if path else key
    if not isinstance(d, dict):
        raise ConfigError(path, "expected a mapping")
    if key not in d or d[key] is None:
        if default is _MISSING:
            raise ConfigError(p, "required field is missing")
        return default
    v = d[key]
    try:
        if kind is float:
            if isinstance(v, bool):
                raise TypeError
            x = float(v)
            if math.isnan(x):
                raise ValueError
            return x
        if kind is int:
            if isinstance(v, bool) or (isinstance(v, float) and not v.is_integer()):
                raise TypeError
            return int(v)
        if kind is bool:
            if not isinstance(v, bool):
                raise TypeError
            return v
        if kind is str:
            if not isinstance(v, str):
                raise TypeError
            return v
        if kind is list:
            if not isinstance(v, list):
                raise TypeError
            return v
        if kind is dict:
            if not isinstance(v, dict):
                raise TypeError
            return v
        return kind(v)
    except (TypeError, ValueError) as exc:
        name = getattr(kind, "__name__", str(kind))
        raise ConfigError(p, f"expected {name}, got {v!r}") from exc


def _float_list(d: dict, key: str, path: str, default=_MISSING) -> list:
    vals = _get(d, key, path, list, default)
    out = []
    for i, v in enumerate(vals):
        try:
            if isinstance(v, bool):
                raise TypeError
            out.append(float(v))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}.{key}[{i}]", f"expected a number, got {v!r}") from exc
    return out


def parse_params(cfg: dict) -> ParamSet:
    d = _get(cfg, "params", "", dict)
    split = d.get("beta_split")
    try:
        return ParamSet(_get(d, "m", "params", int), _get(d, "n", "params", int, 1),
                        _get(d, "alpha", "params"), _get(d, "delta", "params"),
                        _get(d, "delta_tilde", "params"), _get(d, "beta", "params"),
                        _get(d, "gamma", "params", float, 1.0),
                        tuple(_float_list(d, "beta_split", "params")) if split is not None else None)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("params", str(exc)) from exc


def parse_exponents(cfg: dict, m: int) -> ExponentVector:
    vals = _get(cfg, "p", "", list)
    if len(vals) != m:
        raise ConfigError("p", f"expected {m} exponents, got {len(vals)}")
    out = []
    for i, v in enumerate(vals):
        try:
            e = as_exponent(v)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"p[{i}]", f"not an exponent: {v!r}") from exc
        if e is not INF and e < 1:
            raise ConfigError(f"p[{i}]", "exponents must lie in [1, inf]")
        out.append(e)
    return ExponentVector(out)


def parse_quad(cfg: dict) -> QuadSpec:
    d = _get(cfg, "quad", "", dict, {})
    try:
        return QuadSpec(rel_tol=_get(d, "rel_tol", "quad", float, 1e-6), abs_tol=_get(d, "abs_tol", "quad", float, 1e-12))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("quad", str(exc)) from exc


def parse_family(cfg: dict) -> FamilySpec:
    d = _get(cfg, "family", "", dict, {})
    known = {f.name: f for f in fields(FamilySpec)}
    for k in d:
        if k not in known:
            raise ConfigError(f"family.{k}", "unknown field")
    kw = {}
    for k, f in known.items():
        if k in d:
            kind = int if f.type in ("int", int) else bool if f.type in ("bool", bool) else float
            kw[k] = _get(d, k, "family", kind)
    fam = FamilySpec(**kw)
    if not (0 < fam.r_lo < fam.r_hi):
        raise ConfigError("family.r_lo", "need 0 < r_lo < r_hi")
    if fam.per_decade < 1 or fam.centers < 0 or fam.relative < 0:
        raise ConfigError("family", "per_decade >= 1 and nonnegative centre counts required")
    return fam


def _check_specs(items: list, path: str, builder: Callable) -> list:
    out = []
    for i, s in enumerate(items):
        if not isinstance(s, dict):
            raise ConfigError(f"{path}[{i}]", "expected a mapping")
        try:
            builder(s)
        except KeyError as exc:
            raise ConfigError(f"{path}[{i}].{exc.args[0]}", "required field is missing") from exc
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}[{i}]", str(exc)) from exc
        out.append(dict(s))
    return out


def parse_experiment(cfg: dict, seed: int | None = None) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from a parsed YAML mapping."""
    if not isinstance(cfg, dict):
        raise ConfigError("", "top level must be a mapping")
    params = parse_params(cfg)
    p_vec = parse_exponents(cfg, params.m)
    pair = _get(cfg, "pair", "", dict, {"kind": "recipe", "strategy": "auto"})
    if pair.get("kind", "recipe") not in ("recipe", "power", "related", "constant"):
        raise ConfigError("pair.kind", f"unknown pair kind {pair.get('kind')!r}")
    symbols = _check_specs(_get(cfg, "symbols", "", list, []), "symbols", build_symbol)
    functions = _check_specs(_get(cfg, "functions", "", list, []), "functions", build_function)
    kind = _get(cfg, "commutator_kind", "", str, "sum")
    if kind not in ("sum", "product", "none"):
        raise ConfigError("commutator_kind", f"expected sum, product or none, got {kind!r}")
    tol = _get(cfg, "tolerances", "", dict, {})
    base_seed = _get(cfg, "seed", "", int, 0)
    return ExperimentConfig(
        params=params, p_vec=p_vec, pair=dict(pair), symbols=symbols, functions=functions,
        family=parse_family(cfg), seed=base_seed if seed is None else int(seed), quad=parse_quad(cfg),
        commutator_kind=kind, refine_tol=_get(tol, "refine", "tolerances", float, 0.10),
        slope_tol=_get(tol, "slope", "tolerances", float, 0.05),
        surrogate_tol=_get(tol, "surrogate", "tolerances", float, 1e-6))


def parse_weight(d: dict, path: str, n: int = 1) -> Weight:
    kind = _get(d, "kind", path, str, "power")
    if kind == "power":
        return Weight.power(_get(d, "exponent", path), n)
    if kind == "constant":
        return Weight.constant(n)
    raise ConfigError(f"{path}.kind", f"unknown weight kind {kind!r}")


def parse_order(v, path: str):
    try:
        e = as_exponent(v)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(path, f"not an exponent: {v!r}") from exc
    if e is not INF and e <= 1:
        raise ConfigError(path, "reverse Hoelder orders must exceed 1")
    return e


def load_config(path: str | os.PathLike) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("", f"cannot read config: {exc}") from exc
    try:
        cfg = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("", f"invalid YAML: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("", "top level must be a mapping")
    return cfg


# -- subcommands -------------------------------------------------------------------------------
# Each returns (passed, rows, columns, summary).

def _radii(d: dict, path: str, lo=1e-3, hi=1e3, per_decade=2) -> list:
    lo = _get(d, "r_lo", path, float, lo)
    hi = _get(d, "r_hi", path, float, hi)
    k = _get(d, "per_decade", path, int, per_decade)
    if not (0 < lo < hi) or k < 1:
        raise ConfigError(path, "need 0 < r_lo < r_hi and per_decade >= 1")
    count = int(round(math.log10(hi / lo) * k)) + 1
    return [float(r) for r in np.geomspace(lo, hi, count)]


def cmd_check_weight(cfg: dict, seed: int):
    sec = _get(cfg, "check_weight", "", dict, {})
    n = _get(_get(cfg, "params", "", dict, {}), "n", "params", int, 1)
    weights = _get(sec, "weights", "check_weight", list, [{"kind": "power", "exponent": 0.5}])
    orders = [parse_order(v, f"check_weight.rh_orders[{i}]")
              for i, v in enumerate(_get(sec, "rh_orders", "check_weight", list, [2, "inf"]))]
    radii = _radii(sec, "check_weight")
    centers = _float_list(sec, "centers", "check_weight", list(FAR_CENTER_FACTORS))
    quad = parse_quad(cfg)
    fam = [Ball(c * r if n == 1 else (c * r,) + (0.0,) * (n - 1), r) for r in radii for c in centers]
    rows, ok = [], True
    for i, wd in enumerate(weights):
        w = parse_weight(wd, f"check_weight.weights[{i}]", n)
        for s in orders:
            c = rh_constant(w, s, fam, quad)
            rows.append({"weight": w.label, "quantity": "rh", "order": str(s), "value": c})
        rows.append({"weight": w.label, "quantity": "doubling", "order": "", "value": doubling_constant(w, fam, quad)})
    summary = {"weights": len(weights), "balls": len(fam)}
    if "pair" in cfg and "p" in cfg:
        params = parse_params(cfg)
        pv = parse_exponents(cfg, params.m)
        pair, _ = build_pair(cfg["pair"], params, pv, quad)
        for form in ("full", "local", "global"):
            rep = hm_class_constant(pair, params, pv, fam, quad, form)
            bounded = rep.bounded(_get(_get(cfg, "tolerances", "", dict, {}), "slope", "tolerances", float, 0.05))
            rows.append({"weight": "pair", "quantity": f"hm_{form}", "order": "", "value": rep.sup})
            summary[f"hm_{form}"] = {"sup": rep.sup, "slope_low": rep.slope_low, "slope_high": rep.slope_high,
                                     "center_slope": rep.center_slope, "bounded": bounded}
            ok = ok and bounded
    summary["passed"] = ok
    return ok, rows, ("weight", "quantity", "order", "value"), summary


def cmd_gen_example(cfg: dict, seed: int):
    params = parse_params(cfg)
    pv = parse_exponents(cfg, params.m)
    quad = parse_quad(cfg)
    sec = _get(cfg, "gen_example", "", dict, {})
    strategy = _get(sec, "strategy", "gen_example", str, "auto")
    rh = sec.get("rh_order")
    pair, rec = generate_power_example(params, pv, strategy, quad, int(rh) if rh is not None else None)
    fam = default_family(params.n, _get(sec, "per_decade", "gen_example", int, 2),
                         centers=_float_list(sec, "centers", "gen_example", list(FAR_CENTER_FACTORS)))
    rep = hm_class_constant(pair, params, pv, fam, quad)
    slope_tol = _get(_get(cfg, "tolerances", "", dict, {}), "slope", "tolerances", float, 0.05)
    ok = rep.bounded(slope_tol)
    rows = [{"center": b.center[0], "radius": b.radius, "value": v} for b, v in rep.rows]
    summary = {"recipe": rec.to_dict(), "w_exponent": pair.w.exponent,
               "v_exponents": [v.exponent for v in pair.v], "sup": rep.sup, "slope_low": rep.slope_low,
               "slope_high": rep.slope_high, "center_slope": rep.center_slope, "passed": ok}
    return ok, rows, ("center", "radius", "value"), summary


def cmd_region_map(cfg: dict, seed: int):
    sec = _get(cfg, "region_map", "", dict)
    panel = sec.get("panel", "beta>delta")
    if isinstance(panel, str):
        if panel not in PANELS:
            raise ConfigError("region_map.panel", f"unknown panel {panel!r}; choose from {sorted(PANELS)}")
        panel = dict(PANELS[panel])
    elif isinstance(panel, dict):
        for k in ("m", "n", "delta", "beta"):
            _get(panel, k, "region_map.panel", float)
    else:
        raise ConfigError("region_map.panel", "expected a panel name or mapping")
    inv_p = _float_list(sec, "inv_p", "region_map")
    dts = _float_list(sec, "delta_tilde", "region_map")
    grid = region_map(panel, inv_p, dts, _get(sec, "empirical", "region_map", bool, True),
                      quad=parse_quad(cfg))
    rows = grid.rows()
    bad = [r for r in rows if r["empirical"] == "unbounded"]
    counts: dict = {}
    for r in rows:
        counts[r["analytic"]] = counts.get(r["analytic"], 0) + 1
    summary = {"panel": panel, "cells": len(rows), "analytic_counts": dict(sorted(counts.items())),
               "unbounded_cells": len(bad), "passed": not bad}
    return not bad, rows, grid.columns, summary


def cmd_eval_operator(cfg: dict, seed: int):
    params = parse_params(cfg)
    sec = _get(cfg, "eval_operator", "", dict, {})
    points = _float_list(sec, "points", "eval_operator", [-2.0, -0.5, 0.0, 0.25, 0.5, 1.0, 3.0])
    fn = _check_specs(_get(cfg, "functions", "", list), "functions", build_function)
    f = [build_function(s) for s in fn]
    if len(f) != params.m:
        raise ConfigError("functions", f"expected {params.m} functions")
    sy = _check_specs(_get(cfg, "symbols", "", list, []), "symbols", build_symbol)
    b = SymbolVector([build_symbol(s) for s in sy]) if sy else None
    if b is not None and len(b) != params.m:
        raise ConfigError("symbols", f"expected {params.m} symbols")
    K = KernelSpec.standard(params.alpha, params.m)
    quad = parse_quad(cfg)
    rows = []
    for x in points:
        row = {"x": x, "t_alpha": t_alpha(f, x, K, quad)}
        if b is not None:
            row["sum_commutator"] = sum_commutator(b, f, x, "all", K, quad)
            row["product_commutator"] = product_commutator_direct(b, f, x, K, quad)
        rows.append(row)
    cols = ("x", "t_alpha") + (("sum_commutator", "product_commutator") if b is not None else ())
    return True, rows, cols, {"points": len(points), "alpha": params.alpha, "m": params.m, "passed": True}


def cmd_verify(cfg: dict, seed: int):
    config = parse_experiment(cfg, seed)
    table = verify_boundedness(config)
    summary = table.summary()
    summary["config"] = config.to_dict()
    summary["meta"] = table.meta
    return table.passed, table.rows, table.columns, summary


def cmd_rigidity(cfg: dict, seed: int):
    params = parse_params(cfg)
    pv = parse_exponents(cfg, params.m)
    sec = _get(cfg, "rigidity", "", dict, {})
    wspec = sec.get("weights", "related")
    if wspec == "related":
        v = related_power_weights(params, pv, _get(sec, "fraction", "rigidity", float, 0.25))
    elif wspec == "constant":
        v = [Weight.constant(params.n) for _ in range(params.m)]
    elif isinstance(wspec, list) and len(wspec) == params.m:
        v = [Weight.power(float(_get({"e": e}, "e", f"rigidity.weights[{i}]")), params.n)
             for i, e in enumerate(wspec)]
    else:
        raise ConfigError("rigidity.weights", "expected 'related', 'constant' or m exponents")
    radii = _radii(sec, "rigidity", 1e-3, 1e3, 1)
    offsets = _float_list(sec, "offsets", "rigidity", [-0.2, 0.0, 0.2])
    table = rigidity_scan(v, params, pv, radii, offsets, _get(sec, "tolerance", "rigidity", float, 0.02),
                          _get(sec, "separation", "rigidity", float, 0.15), parse_quad(cfg))
    rows = [{k: getattr(r, k) for k in table.columns} for r in table.rows]
    summary = {"rh_xi": table.rh_xi, "passed": table.passed, "weights": [w.label for w in v]}
    return table.passed, rows, table.columns, summary


def cmd_selftest(cfg: dict, seed: int):
    from mlfrac.selftest import run_selftest
    sec = _get(cfg, "selftest", "", dict, {})
    rows = run_selftest(seed, quick=_get(sec, "quick", "selftest", bool, True))
    ok = all(r["pass"] for r in rows)
    summary = {"checks": len(rows), "failed": [r["check"] for r in rows if not r["pass"]], "passed": ok}
    return ok, rows, ("check", "value", "expected", "tolerance", "pass"), summary


HANDLERS = {
    "check-weight": cmd_check_weight, "gen-example": cmd_gen_example, "region-map": cmd_region_map,
    "eval-operator": cmd_eval_operator, "verify": cmd_verify, "rigidity": cmd_rigidity,
    "selftest": cmd_selftest,
}


# -- driver -------------------------------------------------------------------------------------

def _error_record(kind: str, exc: BaseException, path: str | None = None) -> dict:
    rec = {"error": kind, "message": str(exc), "type": type(exc).__name__}
    if path is not None:
        rec["field"] = path
    return rec


def run(command: str, config_path: str, out_dir: str, seed: int | None = None, fmt: str = "both",
        threads: int = 1) -> int:
    """Execute one subcommand; always writes a manifest, and ``error.json`` on failure."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = _now()
    try:
        chash = config_hash(config_path)
    except OSError:
        chash = ""
    manifest = RunManifest(command, str(config_path), chash, -1, __version__, started, threads=threads)
    outputs: list = []
    try:
        if command not in HANDLERS:
            raise ConfigError("command", f"unknown subcommand {command!r}")
        cfg = load_config(config_path)
        run_seed = _get(cfg, "seed", "", int, 0) if seed is None else int(seed)
        manifest.seed = run_seed
        passed, rows, columns, summary = HANDLERS[command](cfg, run_seed)
        summary = dict(summary, command=command, seed=run_seed)
        outputs = emit(rows, columns, summary, out, command.replace("-", "_"), fmt)
        code = EXIT_PASS if passed else EXIT_FAIL
    except ConfigError as exc:
        rec, code = _error_record("config", exc, exc.path), EXIT_CONFIG
    except (XiUndefined, RegionViolation) as exc:
        rec, code = _error_record("config", exc), EXIT_CONFIG
    except HypothesisViolation as exc:
        rec, code = _error_record("hypothesis-violation", exc), EXIT_FAIL
    except (NonIntegrableTail, QuadratureError, SearchFailure, FloatingPointError) as exc:
        rec, code = _error_record("numerical", exc), EXIT_NUMERICAL
    if code not in (EXIT_PASS, EXIT_FAIL) or (code == EXIT_FAIL and not outputs):
        (out / "error.json").write_text(json_text(rec), encoding="utf-8")
        outputs.append("error.json")
        print(f"mlfrac {command}: {rec['error']} error: {rec['message']}", file=sys.stderr)
    manifest.finished = _now()
    manifest.exit_code = code
    manifest.outputs = outputs
    manifest.write(out)
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mlfrac", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"mlfrac {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="YAML run configuration")
    ap.add_argument("--out", default="results", help="output directory")
    ap.add_argument("--seed", type=int, default=None, help="overrides the seed in the config")
    ap.add_argument("--threads", type=int, default=1, help="recorded in the manifest; runs are single-threaded")
    ap.add_argument("--format", dest="fmt", choices=("csv", "json", "both"), default="both")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("mlfrac: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None and not 0 <= args.seed < 2 ** 64:
        print("mlfrac: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_CONFIG
    return run(args.command, args.config, args.out, args.seed, args.fmt, args.threads)


if __name__ == "__main__":
    sys.exit(main())
