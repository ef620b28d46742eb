"""Brute-force search for the reverse Hölder constant tau on the n = 1 corpus.

For every weight the smallest passing tau is found by bisection; the script
prints the corpus maximum and checks that the starting guess passes
everywhere.  With ``--write`` the result is stored in the frozen data file.
"""
from __future__ import annotations

import argparse
import json
import time
from importlib import resources

from sparsedom.io import atomic_write_json
from sparsedom.verify.corpus import corpus_generate
from sparsedom.weights import reverse_holder_check

TAU_CORPUS = "n=1,depth=8,count=200,weights=power+cascade,f=spike,m=2+4"
TAU_SEED = 20261016
TAU_GUESS = 1024.0


def sweep(seed: int = TAU_SEED, spec: str = TAU_CORPUS, tau: float = TAU_GUESS) -> dict:
    worst, failures = 0.0, []
    for inst in corpus_generate(seed, spec):
        rep = reverse_holder_check(inst.w, tau)
        worst = max(worst, rep.min_tau)
        if not rep.passed:
            failures.append(inst.id)
    return {"tau": tau, "tau_min_observed": worst, "tau_corpus": spec, "tau_seed": seed,
            "tau_failures": failures}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tau", type=float, default=TAU_GUESS)
    ap.add_argument("--write", action="store_true", help="store tau in the package data file")
    args = ap.parse_args()
    t0 = time.perf_counter()
    res = sweep(tau=args.tau)
    print(json.dumps(res, indent=2))
    print(f"elapsed {time.perf_counter() - t0:.1f}s")
    if args.write:
        if res["tau_failures"]:
            raise SystemExit("refusing to freeze a tau that fails on the corpus")
        path = resources.files("sparsedom.data").joinpath("baselines.json")
        obj = json.loads(path.read_text())
        obj.update({k: v for k, v in res.items() if k != "tau_failures"})
        atomic_write_json(str(path), obj)


if __name__ == "__main__":
    main()
