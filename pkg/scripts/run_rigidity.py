"""Exponent rigidity scans for constant and related power weights.

Usage: python scripts/run_rigidity.py
"""

from mlfrac.core import ExponentVector, ParamSet
from mlfrac.experiments import related_power_weights, rigidity_scan
from mlfrac.weights import Weight


def main():
    # p = (3/2, 3/2) gives xi = 3/2 > 1
    params = ParamSet(2, 1, 0.6, 0.5, 0.0, 1.5)
    pv = ExponentVector(["3/2", "3/2"])
    cases = {"constant": [Weight.constant()] * 2}
    cases.update({f"related {q:g}": related_power_weights(params, pv, q) for q in (0.1, 0.25, 0.5)})
    for label, v in cases.items():
        table = rigidity_scan(v, params, pv)
        slopes = "  ".join(f"{r.offset:+.1f}:{r.slope:+.4f}" for r in table.rows)
        print(f"{label:14s} {slopes}  RH_xi {table.rh_xi:.4g}  passed {table.passed}")


if __name__ == "__main__":
    main()
