"""Command-line front end.

Exit codes: 0 on success, 2 when an asserted check fails, 1 on usage or I/O
errors.  Outputs are written atomically; inputs are never modified.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from .dyadic import Cube, DGFError, GridFunction, read_function, write_function
from .io import atomic_write_json, atomic_write_text
from .maximal import orlicz_maximal, restricted_maximal
from .orlicz import luxemburg_norm, parse_young
from .rdf import rdf_build
from .sparse import is_sparse, read_family, sparse_from_cz, write_family
from .verify import checks
from .verify.corpus import corpus_generate, parse_corpus_spec
from .verify.norms import lp_norm, weak_norm
from .verify.sweep import load_baselines, load_plan, run_sweep, write_baselines, write_csv
from .weights import reverse_holder_check, weight_constants

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- run configuration ---------------------------------------------------------------

PARAM_RANGES = {
    "p": (1.0, math.inf, False), "delta": (0.0, 1.0, True), "eps": (0.0, 1.0, True),
    "lambda": (0.0, math.inf, False), "tau": (0.0, math.inf, False), "s": (1.0, math.inf, False),
    "gamma": (0.0, 1.0, False),
}


@dataclass
class RunConfig:
    command: str
    inputs: dict = field(default_factory=dict)
    output: str | None = None
    young: str | None = None
    params: dict = field(default_factory=dict)
    seed: int | None = None

    def validate(self) -> "RunConfig":
        for key, val in self.params.items():
            if key not in PARAM_RANGES:
                raise UsageError(f"unknown parameter {key!r}")
            lo, hi, closed = PARAM_RANGES[key]
            if not (lo < val < hi or (closed and val == hi)):
                bracket = "]" if closed else ")"
                raise UsageError(f"{key}={val} outside ({lo}, {hi}{bracket}")
        return self


def parse_params(text: str | None) -> dict[str, float]:
    out: dict[str, float] = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise UsageError(f"bad parameter {item!r}; expected key=value")
        k, v = (s.strip() for s in item.split("=", 1))
        try:
            out[k] = float(v)
        except ValueError:
            raise UsageError(f"parameter {k} is not a number: {v!r}") from None
    return out


def _read(path: str) -> GridFunction:
    return read_function(path)


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _json_default(x):
    if isinstance(x, Cube):
        return {"level": x.level, "index": list(x.index)}
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _finite(x: float):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


# --- subcommands ---------------------------------------------------------------------

def cmd_gen(a) -> int:
    cfg = RunConfig("gen", output=a.out, seed=a.seed).validate()
    corpus = corpus_generate(cfg.seed, parse_corpus_spec(a.spec))
    manifest = {"seed": corpus.seed, "spec": corpus.spec.text(), "instances": []}
    for inst in corpus:
        d = os.path.join(cfg.output, inst.id)
        write_function(inst.f, os.path.join(d, "f.dgf"))
        write_function(inst.w, os.path.join(d, "w.dgf"))
        write_function(inst.sigma, os.path.join(d, "sigma.dgf"))
        manifest["instances"].append(inst.descriptor())
    atomic_write_json(os.path.join(cfg.output, "manifest.json"), manifest)
    return EXIT_OK


def cmd_norm(a) -> int:
    f = _read(a.input)
    if a.young:
        A = parse_young(a.young)
        Q = Cube(a.level, tuple(int(i) for i in a.index.split(","))) if a.index else f.grid.root
        if a.index is None and a.level != 0:
            raise UsageError("--level needs --index")
        res = luxemburg_norm(f, Q, A)
        out = {"norm": "luxemburg", "young": A.spec, "cube": Q, "value": res.value,
               "iterations": res.iterations, "bracket_width": res.bracket_width}
    else:
        p = a.lp if a.lp is not None else 1.0
        RunConfig("norm", params={"p": p} if p > 1 else {}).validate()
        w = _read(a.w) if a.w else None
        val = weak_norm(f, w, p) if a.weak else lp_norm(f, w, p)
        out = {"norm": "weak" if a.weak else "strong", "p": p, "value": val}
    _emit(out, a.out)
    return EXIT_OK


def cmd_maximal(a) -> int:
    f = _read(a.input)
    A = parse_young(a.young)
    if a.mask:
        E = _read(a.mask).values != 0
        res = restricted_maximal(f, E, A)
    else:
        res = orlicz_maximal(f, A)
    write_function(res.output, a.out)
    return EXIT_OK


def cmd_sparse(a) -> int:
    cfg = RunConfig("sparse", params={"lambda": a.lam}).validate()
    f = _read(a.input)
    S = sparse_from_cz(f, cfg.params["lambda"], a.ratio)
    ok, why = is_sparse(S)
    write_family(S, a.out)
    if not ok:
        print(f"family is not sparse: {why}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_constants(a) -> int:
    params = {"p": a.p}
    if a.tau is not None:
        params["tau"] = a.tau
    RunConfig("constants", params=params).validate()
    w = _read(a.input)
    wc = weight_constants(GridFunction(w.grid, w.values, weight=True), a.p)
    out = {k: _finite(v) if isinstance(v, float) else v for k, v in asdict(wc).items()}
    for key in ("a1_cube", "ap_cube", "ainfty_cube"):
        Q = getattr(wc, key)
        out[key] = None if Q is None else {"level": Q.level, "index": list(Q.index)}
    if a.tau is not None:
        rh = reverse_holder_check(GridFunction(w.grid, w.values, weight=True), a.tau)
        out["reverse_holder"] = {"tau": rh.tau, "r_w": rh.r, "ratio": rh.ratio, "pass": rh.passed,
                                 "min_tau": rh.min_tau}
    _emit(out, a.out)
    return EXIT_OK if a.tau is None or out["reverse_holder"]["pass"] else EXIT_FAIL


def cmd_rdf(a) -> int:
    RunConfig("rdf", params={"s": a.s}).validate()
    h, v = _read(a.h), _read(a.v)
    res = rdf_build(h, v, a.s, a.tol)
    out = {"s": a.s, "K": res.K, "s_norm": res.s_norm, "tol": res.tol,
           "majorant": {"pass": res.majorizes},
           "norm": {"lhs": res.R_norm, "rhs": 2 * res.h_norm, "pass": res.norm_ok},
           "a1": {"value": _finite(res.a1), "over_s_dual": _finite(res.a1_ratio),
                  "pass": math.isfinite(res.a1)}}
    _emit(out, a.out)
    if a.R_out:
        write_function(res.R, a.R_out)
    return EXIT_OK if res.passed else EXIT_FAIL


_VERIFY_PARAMS = {
    "lemma41": (), "carleson": (), "fs": (), "cz": ("lambda",),
    "endpoint": ("eps",), "lp": ("p", "delta"), "cor14": ("tau",),
    "two_weight_max": ("p", "delta"), "cor16a": ("p", "delta"),
    "reverse_holder": ("tau",), "rdf": ("s",),
}


def cmd_verify(a) -> int:
    vid = a.id
    params = parse_params(a.params)
    unknown = set(params) - set(_VERIFY_PARAMS[vid])
    if unknown:
        raise UsageError(f"verify {vid}: unknown parameters {sorted(unknown)}")
    if vid == "cor14" and "tau" not in params:
        from .verify.sweep import frozen_tau
        params["tau"] = frozen_tau()
    missing = set(_VERIFY_PARAMS[vid]) - set(params) - {"lambda"}
    if missing:
        raise UsageError(f"verify {vid}: missing parameters {sorted(missing)}")
    RunConfig("verify", params=params).validate()

    def need(name):
        path = getattr(a, name)
        if not path:
            raise UsageError(f"verify {vid} needs --{name}")
        return _read(path)

    base = load_baselines(a.baselines).get(vid) if a.baselines else None
    fam = read_family(a.family) if a.family else None
    f = need("f") if vid not in ("carleson", "reverse_holder") else None
    if vid in ("lemma41", "endpoint", "lp", "cor14") and fam is None:
        fam = checks.default_family(f)
    if vid == "lemma41":
        reps = [checks.verify_lemma41(f, need("w"), fam)]
    elif vid == "carleson":
        w = need("w")
        if fam is None:
            raise UsageError("verify carleson needs --family")
        reps = [checks.verify_carleson(fam, w)]
    elif vid == "fs":
        reps = [checks.verify_fs(f, need("w"))]
    elif vid == "cz":
        reps = checks.verify_cz(f, need("w"), params.get("lambda"))
    elif vid == "endpoint":
        reps = [checks.verify_endpoint(f, need("w"), params["eps"], fam, base)]
    elif vid == "lp":
        reps = [checks.verify_lp(f, need("w"), params["p"], params["delta"], fam, base)]
    elif vid == "cor14":
        reps = checks.verify_cor14(f, need("w"), fam, params["tau"], base)
    elif vid == "two_weight_max":
        reps = [checks.verify_two_weight_max(f, need("w"), need("sigma"), params["p"], params["delta"], base)]
    elif vid == "cor16a":
        reps = checks.verify_cor16a(f, need("w"), need("sigma"), params["p"], params["delta"], fam, base)
    elif vid == "reverse_holder":
        reps = [checks.verify_reverse_holder(need("w"), params["tau"])]
    else:
        reps = checks.verify_rdf(f, need("w"), params["s"])
    out = [r.to_dict() for r in reps]
    _emit(out if len(out) > 1 else out[0], a.out)
    failed = any(r.bound is not None and not r.passed for r in reps)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_sweep(a) -> int:
    plan = load_plan(a.plan)
    if a.update_baselines:
        if not a.baselines:
            raise UsageError("--update-baselines needs --baselines PATH")
        result = run_sweep(plan, None, a.threads)
        write_csv(result, a.out)
        write_baselines(result, a.baselines, {"seed": plan.seed, "corpora": list(plan.corpora)})
    else:
        base = load_baselines(a.baselines) if a.baselines else None
        result = run_sweep(plan, base, a.threads)
        write_csv(result, a.out)
    fails = result.failures()
    for r in fails[:20]:
        print(f"FAIL {r.id} {r.instance.get('id', '')} ratio={r.ratio:.6g} bound={r.bound:.6g}",
              file=sys.stderr)
    return EXIT_FAIL if fails else EXIT_OK


# --- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sparsedom", description="Dyadic weighted-inequality toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a seeded corpus of DGF1 files")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--spec", required=True, help="e.g. n=1,depth=8,count=10,weights=cascade,f=spike,m=2")
    g.add_argument("--out", required=True, help="output directory")
    g.set_defaults(run=cmd_gen)

    n = sub.add_parser("norm", help="Luxemburg norm over a cube, or weighted L^p / weak L^p norm")
    n.add_argument("--in", dest="input", required=True)
    mx = n.add_mutually_exclusive_group()
    mx.add_argument("--young", help="Young function spec, e.g. logbump:p=2,a=1.5")
    mx.add_argument("--lp", type=float, help="exponent p >= 1 for the weighted norm")
    n.add_argument("--level", type=int, default=0)
    n.add_argument("--index", help="comma-separated cube index (default: root)")
    n.add_argument("--w", help="weight DGF1 file for --lp")
    n.add_argument("--weak", action="store_true", help="weak-type norm instead of strong")
    n.add_argument("--out")
    n.set_defaults(run=cmd_norm)

    m = sub.add_parser("maximal", help="dyadic Orlicz maximal function")
    m.add_argument("--in", dest="input", required=True)
    m.add_argument("--young", default="power:p=1")
    m.add_argument("--mask", help="DGF1 file; nonzero cells form the restriction set")
    m.add_argument("--out", required=True)
    m.set_defaults(run=cmd_maximal)

    s = sub.add_parser("sparse", help="sparse family from the CZ ladder")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--ratio", type=float, default=None, help="ladder ratio (default 2^(n+1)+1)")
    s.add_argument("--out", required=True)
    s.set_defaults(run=cmd_sparse)

    c = sub.add_parser("constants", help="A1, Ap and A_infty constants of a weight")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--p", type=float, default=2.0)
    c.add_argument("--tau", type=float, help="also run the reverse Hölder check at this tau")
    c.add_argument("--out")
    c.set_defaults(run=cmd_constants)

    r = sub.add_parser("rdf", help="Rubio de Francia majorant and its three properties")
    r.add_argument("--h", required=True)
    r.add_argument("--v", required=True)
    r.add_argument("--s", type=float, default=2.0)
    r.add_argument("--tol", type=float, default=1e-10)
    r.add_argument("--out")
    r.add_argument("--R-out", dest="R_out", help="also write R(h) as DGF1")
    r.set_defaults(run=cmd_rdf)

    v = sub.add_parser("verify", help="run one verifier on files")
    v.add_argument("id", choices=sorted(_VERIFY_PARAMS))
    v.add_argument("--f")
    v.add_argument("--w", help="weight w (or u for the two-weight checks, v for rdf)")
    v.add_argument("--sigma")
    v.add_argument("--family", help="family.json (default: CZ ladder of f)")
    v.add_argument("--params", help="comma-separated key=value list")
    v.add_argument("--baselines", help="baselines.json for the anonymous-constant checks")
    v.add_argument("--out")
    v.set_defaults(run=cmd_verify)

    w = sub.add_parser("sweep", help="run a sweep plan over a seeded corpus")
    w.add_argument("--plan", required=True)
    w.add_argument("--out", required=True)
    w.add_argument("--baselines")
    w.add_argument("--update-baselines", action="store_true")
    w.add_argument("--threads", type=int, default=None)
    w.set_defaults(run=cmd_sweep)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.run(args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except DGFError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
