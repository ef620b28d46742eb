"""Run the default sweep once and freeze per-verifier maximum ratios.

Only the verifiers whose constant is anonymous get a baseline; later runs
assert that no ratio exceeds the frozen value by more than 5%.
"""
from __future__ import annotations

import argparse
import json
import time
from importlib import resources

from sparsedom.io import atomic_write_json
from sparsedom.verify.checks import BASELINE_IDS
from sparsedom.verify.sweep import default_plan, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--csv", help="also write the sweep rows here")
    args = ap.parse_args()
    plan = default_plan()
    t0 = time.perf_counter()
    result = run_sweep(plan, threads=1)
    elapsed = time.perf_counter() - t0
    ratios = {k: v for k, v in sorted(result.max_ratios().items()) if k in BASELINE_IDS}
    path = resources.files("sparsedom.data").joinpath("baselines.json")
    obj = json.loads(path.read_text())
    obj.update({"ratios": ratios, "seed": plan.seed, "corpora": list(plan.corpora),
                "sweep_seconds": round(elapsed, 1)})
    atomic_write_json(str(path), obj)
    if args.csv:
        from sparsedom.io import atomic_write_text
        atomic_write_text(args.csv, result.csv_text())
    print(json.dumps(obj, indent=2))


if __name__ == "__main__":
    main()
