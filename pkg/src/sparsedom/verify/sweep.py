"""Parameter sweeps over seeded corpora, CSV output and regression baselines.

A plan is an INI file.  The ``[corpus]`` section names a seed and one or more
corpus specs separated by ``;``.  Every other section is a verifier id whose
keys list comma-separated parameter values; the sweep runs the Cartesian
product in the order written.
"""
from __future__ import annotations

import configparser
import csv
import io
import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

from ..io import atomic_write_json, atomic_write_text
from .checks import BASELINE_IDS, VERIFIERS, VerificationReport
from .corpus import Corpus, corpus_generate, parse_corpus_spec

__all__ = ["SweepPlan", "SweepRow", "SweepResult", "parse_plan", "load_plan", "default_plan",
           "run_sweep", "load_baselines", "write_baselines", "default_baselines", "thread_count",
           "CSV_COLUMNS"]

CSV_COLUMNS = ("verifier", "check", "instance", "params", "lhs", "rhs", "ratio", "bound", "pass", "note")


@dataclass(frozen=True)
class SweepPlan:
    seed: int
    corpora: tuple[str, ...]
    verifiers: tuple[tuple[str, tuple[tuple[str, tuple[float, ...]], ...]], ...]

    def points(self, vid: str) -> list[dict]:
        grid = dict(self.verifiers)[vid]
        names = [k for k, _ in grid]
        return [dict(zip(names, combo)) for combo in itertools.product(*(v for _, v in grid))]


def parse_plan(text: str) -> SweepPlan:
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    cp.optionxform = str
    cp.read_string(text)
    if "corpus" not in cp:
        raise ValueError("plan needs a [corpus] section")
    corpus = cp["corpus"]
    extra = set(corpus) - {"seed", "spec"}
    if extra:
        raise ValueError(f"unknown [corpus] keys {sorted(extra)}")
    seed = int(corpus.get("seed", "0"))
    specs = tuple(s.strip() for s in corpus.get("spec", "").split(";") if s.strip())
    if not specs:
        raise ValueError("[corpus] spec is empty")
    for s in specs:
        parse_corpus_spec(s)
    verifiers = []
    for sec in cp.sections():
        if sec == "corpus":
            continue
        if sec not in VERIFIERS:
            raise ValueError(f"unknown verifier id {sec!r}")
        v = VERIFIERS[sec]
        unknown = set(cp[sec]) - set(v.params)
        if unknown:
            raise ValueError(f"[{sec}] unknown parameters {sorted(unknown)}")
        missing = set(v.params) - set(cp[sec])
        if missing:
            raise ValueError(f"[{sec}] missing parameters {sorted(missing)}")
        grid = tuple((k, tuple(float(x) for x in cp[sec][k].split(","))) for k in v.params)
        verifiers.append((sec, grid))
    return SweepPlan(seed, specs, tuple(verifiers))


def load_plan(path: str) -> SweepPlan:
    with open(path) as fh:
        return parse_plan(fh.read())


def default_plan_text() -> str:
    return resources.files("sparsedom.data").joinpath("default_plan.ini").read_text()


def default_plan() -> SweepPlan:
    return parse_plan(default_plan_text())


def thread_count() -> int:
    env = os.environ.get("SPARSEDOM_THREADS")
    cpus = os.cpu_count() or 1
    if env:
        try:
            return max(1, min(int(env), cpus))
        except ValueError:
            raise ValueError("SPARSEDOM_THREADS must be an integer") from None
    return cpus


@dataclass(frozen=True)
class SweepRow:
    verifier: str
    instance: str
    params: dict
    report: VerificationReport | None
    note: str = ""

    def cells(self) -> list[str]:
        r = self.report
        num = (lambda x: "" if x is None else repr(float(x)))
        prm = json.dumps(self.params, sort_keys=True)
        if r is None:
            return [self.verifier, self.verifier, self.instance, prm, "", "", "", "", "", self.note]
        return [self.verifier, r.id, self.instance, prm, num(r.lhs), num(r.rhs), num(r.ratio),
                num(r.bound), "1" if r.passed else "0", self.note]


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)

    def csv_text(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(CSV_COLUMNS)
        for row in self.rows:
            wr.writerow(row.cells())
        return buf.getvalue()

    def reports(self, check: str | None = None) -> list[VerificationReport]:
        return [r.report for r in self.rows if r.report is not None and (check is None or r.report.id == check)]

    def max_ratios(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for r in self.reports():
            if math.isfinite(r.ratio):
                out[r.id] = max(out.get(r.id, 0.0), r.ratio)
        return out

    def failures(self) -> list[VerificationReport]:
        """Asserted checks (bound present) that did not pass."""
        return [r for r in self.reports() if r.bound is not None and not r.passed]


def _run_instance(args):
    vid, inst, points, baselines = args
    v = VERIFIERS[vid]
    cache: dict = {}
    rows = []
    for prm in points:
        if inst.degenerate:
            rows.append(SweepRow(vid, inst.id, prm, None, "skipped: degenerate weight"))
            continue
        try:
            reps = v.run(inst, prm, cache, baselines)
        except ValueError as exc:
            rows.append(SweepRow(vid, inst.id, prm, None, f"error: {exc}"))
            continue
        rows.extend(SweepRow(vid, inst.id, prm, r) for r in reps)
    return rows


def run_sweep(plan: SweepPlan, baselines: dict[str, float] | None = None,
              threads: int | None = None) -> SweepResult:
    """Rows ordered by (verifier in plan order, instance, parameter point)."""
    baselines = baselines or {}
    corpora: list[Corpus] = [corpus_generate(plan.seed, s) for s in plan.corpora]
    instances = [inst for c in corpora for inst in c]
    threads = thread_count() if threads is None else max(1, threads)
    result = SweepResult()
    for vid, _ in plan.verifiers:
        jobs = [(vid, inst, plan.points(vid), baselines) for inst in instances]
        if threads == 1:
            chunks = map(_run_instance, jobs)
        else:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                chunks = list(ex.map(_run_instance, jobs))
        for rows in chunks:
            result.rows.extend(rows)
    return result


def load_baselines(path: str | None = None) -> dict[str, float]:
    if path is None:
        return default_baselines()
    with open(path) as fh:
        obj = json.load(fh)
    return {k: float(v) for k, v in obj.get("ratios", obj).items()}


def default_baselines() -> dict[str, float]:
    obj = json.loads(resources.files("sparsedom.data").joinpath("baselines.json").read_text())
    return {k: float(v) for k, v in obj["ratios"].items()}


def frozen_tau() -> float:
    obj = json.loads(resources.files("sparsedom.data").joinpath("baselines.json").read_text())
    return float(obj["tau"])


def write_baselines(result: SweepResult, path: str, extra: dict | None = None) -> dict:
    ratios = {k: v for k, v in sorted(result.max_ratios().items()) if k in BASELINE_IDS}
    obj = {**(extra or {}), "ratios": ratios}
    atomic_write_json(path, obj)
    return obj


def write_csv(result: SweepResult, path: str) -> None:
    atomic_write_text(path, result.csv_text())
