"""Sweeps over group families and the aggregated verification gate."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import patterns as pat
from .characters import UNBOUNDED, CharacterTable, cached_character_degrees
from .conjugacy import (commuting_pairs, conjugacy_classes, invariant_correlation,
                        noncommutativity_bound, project_invariant)
from .functions import (DEFAULT_SEED, DensityFunction, random_mean_zero,
                        random_signs, random_subset, rng_for)
from .groups import CapExceeded, FiniteGroup, check_group_axioms, parse_group
from .mixing import (FOUR_FUNCTION_MAX_ORDER, convolution_operator_norm,
                     four_function_deviation, quadruple_statistic_gap,
                     relative_mixing_deviation, triple_intersection_profile,
                     weak_mixing_deviation)

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
STATS = ("weak", "opnorm", "four", "relative", "triple", "quad")
CSV_FIELDS = ("schema_version", "group", "order", "D", "trial", "seed", "stat",
              "deviation", "paper_bound", "satisfied")
DEFAULT_FLEET = ("cyclic:6", "sym:3", "sym:4", "alt:4", "sl2:3", "sl2:5", "sl2:7", "alt:6")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    groups: list[str] = field(default_factory=list)
    stats: list[str] = field(default_factory=lambda: ["relative"])
    trials: int = 32
    seed: int = DEFAULT_SEED
    density: float = 0.5
    eps: float = 0.05
    samples: int = 0
    out_dir: Path = Path("qrlab-out")
    max_workers: int = 1
    max_order: int | None = None
    iteration_budget: int = pat.ITERATION_BUDGET
    four_max_order: int = FOUR_FUNCTION_MAX_ORDER

    def validate(self) -> None:
        for d in self.groups:
            parse_group(d, self.max_order)
        bad = [s for s in self.stats if s not in STATS]
        if bad:
            raise ConfigError(f"unknown statistics: {bad}")
        if self.trials < 0 or self.max_workers < 1 or self.iteration_budget < 1:
            raise ConfigError("trials must be >= 0; budgets and max_workers positive")
        if not 0 <= self.density <= 1:
            raise ConfigError("density must lie in [0, 1]")


def split_descriptors(text: str) -> list[str]:
    """Split a comma list of descriptors, ignoring commas inside prod(...)."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
            continue
        depth += (ch == "(") - (ch == ")")
        cur.append(ch)
    if "".join(cur).strip():
        out.append("".join(cur).strip())
    return [d for d in out if d]


def parse_config(text: str) -> ExperimentConfig:
    """Flat ``key = value`` lines; '#' starts a comment."""
    cfg = ExperimentConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key == "groups":
                cfg.groups = split_descriptors(value)
            elif key == "stats":
                cfg.stats = [s.strip() for s in value.split(",") if s.strip()]
            elif key in ("trials", "seed", "samples", "max_workers"):
                setattr(cfg, key, int(value))
            elif key in ("density", "eps"):
                setattr(cfg, key, float(value))
            elif key == "out_dir":
                cfg.out_dir = Path(value)
            elif key == "caps.max_order":
                cfg.max_order = int(value)
            elif key == "caps.iteration_budget":
                cfg.iteration_budget = int(value)
            elif key == "caps.four_max_order":
                cfg.four_max_order = int(value)
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return cfg


def load_config(path) -> ExperimentConfig:
    cfg = parse_config(Path(path).read_text())
    cfg.validate()
    return cfg


# -- per-trial statistics --------------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def stat_rows(G: FiniteGroup, D, stat: str, trial: int, seed: int, *, classes=None,
              density: float = 0.5, eps: float = 0.05, samples: int = 0,
              four_max_order: int = FOUR_FUNCTION_MAX_ORDER) -> list[dict]:
    """Rows (stat, deviation, paper_bound, satisfied) for one trial of one statistic."""
    rng = rng_for(G.descriptor, seed, trial, stat)
    d_int = None if D is UNBOUNDED else D
    rows = []

    def row(name, deviation, bound=None, satisfied=None):
        rows.append({"stat": name, "deviation": deviation, "paper_bound": bound,
                     "satisfied": satisfied})

    if stat == "weak":
        f1, f2 = random_signs(G, rng), random_signs(G, rng)
        r = weak_mixing_deviation(G, f1, f2, D)
        row("weak", r.deviation_mean, r.paper_bound, r.bound_satisfied)
        if r.exceptional_fraction is not None:
            row("markov", r.exceptional_fraction, r.exceptional_threshold, r.markov_satisfied)
    elif stat == "opnorm":
        f2 = random_mean_zero(G, rng)
        r = convolution_operator_norm(G, f2, D, seed=trial)
        row("opnorm", r.operator_norm, r.paper_bound, r.bound_satisfied)
        err = abs(r.hilbert_schmidt_norm - r.f2_norm)
        row("hs_identity", err, 1e-10, err <= 1e-10)
    elif stat == "four":
        if G.order > four_max_order:
            raise CapExceeded(f"four-function statistic skipped: |G| > {four_max_order}")
        fs = [random_signs(G, rng) for _ in range(4)]
        r = four_function_deviation(G, *fs, D=D)
        row("four", r.deviation_mean, r.paper_bound, r.bound_satisfied)
    elif stat == "relative":
        fs = [random_signs(G, rng) for _ in range(3)]
        r = relative_mixing_deviation(G, *fs, classes=classes)
        row("relative", r.deviation_mean)
    elif stat == "triple":
        A, B = random_subset(G, density, rng), random_subset(G, density, rng)
        prof = triple_intersection_profile(G, A, B, eps)
        row("triple_lower_violations", prof.lower_violation_fraction)
        row("triple_upper_violations", prof.upper_violation_fraction)
    elif stat == "quad":
        fs = [random_signs(G, rng) for _ in range(4)]
        q = quadruple_statistic_gap(G, *fs, sample_count=samples, seed=trial, classes=classes)
        row("quad", q.gap)
        if q.mc_agrees is not None:
            row("quad_mc_error", abs(q.mc_estimate - q.right), 4 * q.mc_stderr, q.mc_agrees)
    else:
        raise ConfigError(f"unknown statistic {stat!r}")
    base = {"schema_version": SCHEMA_VERSION, "group": G.descriptor, "order": G.order,
            "D": d_int if d_int is not None else "unbounded", "trial": trial, "seed": seed}
    return [{**base, **r} for r in rows]


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _fmt(r.get(k)) for k in CSV_FIELDS})
    return buf.getvalue()


# -- sweeps ------------------------------------------------------------------------------

@dataclass
class GroupResult:
    descriptor: str
    rows: list[dict]
    error: str | None = None
    seconds: float = 0.0


def _run_group(descriptor: str, cfg: ExperimentConfig) -> GroupResult:
    start = time.perf_counter()
    try:
        G = parse_group(descriptor, cfg.max_order)
        classes = conjugacy_classes(G)
        D = cached_character_degrees(G, classes=classes).quasirandomness_degree
        rows = []
        for stat in cfg.stats:
            for trial in range(cfg.trials):
                try:
                    rows += stat_rows(G, D, stat, trial, cfg.seed, classes=classes,
                                      density=cfg.density, eps=cfg.eps, samples=cfg.samples,
                                      four_max_order=cfg.four_max_order)
                except CapExceeded as exc:
                    log.warning("%s/%s: %s", descriptor, stat, exc)
                    break
        return GroupResult(descriptor, rows, seconds=time.perf_counter() - start)
    except Exception as exc:  # isolate per-group failures
        log.error("group %s failed: %s", descriptor, exc)
        return GroupResult(descriptor, [], error=f"{type(exc).__name__}: {exc}",
                           seconds=time.perf_counter() - start)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(text)
    os.replace(tmp, path)


def summarise(rows: list[dict]) -> list[dict]:
    """Median and max deviation per (group, stat), in first-seen order."""
    grouped: dict[tuple[str, str], list[float]] = {}
    for r in rows:
        grouped.setdefault((r["group"], r["stat"]), []).append(float(r["deviation"]))
    return [{"group": g, "stat": s, "trials": len(v), "median": statistics.median(v),
             "max": max(v)} for (g, s), v in grouped.items()]


def run_sweep(cfg: ExperimentConfig, write: bool = True) -> list[dict]:
    """Run every statistic on every group; data rows go to ``sweep.csv``,
    medians to ``summary.csv`` and timings/errors to ``sweep.meta.json``."""
    cfg.validate()
    started = time.time()
    with ThreadPoolExecutor(max_workers=cfg.max_workers) as pool:
        results = list(pool.map(lambda d: _run_group(d, cfg), cfg.groups))
    rows = [r for res in results for r in res.rows]
    if write:
        out = Path(cfg.out_dir)
        _atomic_write(out / "sweep.csv", rows_to_csv(rows))
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["schema_version", "group", "stat", "trials",
                                            "median", "max"], lineterminator="\n")
        w.writeheader()
        for s in summarise(rows):
            w.writerow({"schema_version": SCHEMA_VERSION,
                        **{k: _fmt(v) for k, v in s.items()}})
        _atomic_write(out / "summary.csv", buf.getvalue())
        meta = {"schema_version": SCHEMA_VERSION, "started": started, "finished": time.time(),
                "seed": cfg.seed,
                "groups": [{"descriptor": r.descriptor, "seconds": r.seconds, "error": r.error}
                           for r in results]}
        _atomic_write(out / "sweep.meta.json", json.dumps(meta, indent=2))
    return rows


# -- verification gate --------------------------------------------------------------------

def _check(name: str, group: str, passed: bool, **detail) -> dict:
    return {"check": name, "group": group, "passed": bool(passed), "detail": detail}


def verify_group(descriptor: str, cfg: ExperimentConfig) -> list[dict]:
    G = parse_group(descriptor, cfg.max_order)
    n = G.order
    checks = [_check("group_axioms", descriptor, check_group_axioms(G))]
    classes = conjugacy_classes(G)
    checks.append(_check("class_sizes", descriptor,
                         sum(classes.class_sizes) == n and all(n % s == 0 for s in classes.class_sizes),
                         class_count=classes.class_count))
    table: CharacterTable = cached_character_degrees(G, classes=classes)
    D = table.quasirandomness_degree
    checks.append(_check("sum_of_squared_degrees", descriptor,
                         table.sum_of_squares() == n and table.class_count == classes.class_count
                         and all(n % d == 0 for d in table.degrees),
                         degrees=list(table.degrees), D=str(D)))
    cp = commuting_pairs(G)
    checks.append(_check("burnside", descriptor, cp == n * classes.class_count,
                         commuting_pairs=cp))
    if D is not UNBOUNDED:
        bound = noncommutativity_bound(G, D)
        checks.append(_check("commuting_pair_bound", descriptor, cp <= bound,
                             bound=str(bound)))

    rng = rng_for(descriptor, cfg.seed, 0, "projection")
    worst_gap = None
    ok = True
    for _ in range(max(cfg.trials, 1)):
        B = random_subset(G, rng.random(), rng)
        lhs = invariant_correlation(classes, DensityFunction.indicator(B),
                                    DensityFunction.indicator(B))
        gap = lhs - Fraction(B.size, n) ** 2
        worst_gap = gap if worst_gap is None else min(worst_gap, gap)
        ok &= gap >= 0
        f = DensityFunction(G, rng.standard_normal(n))
        P = project_invariant(classes, f)
        ok &= bool(np.allclose(project_invariant(classes, P).values, P.values, atol=1e-12, rtol=0))
        ok &= abs(P.mean() - f.mean()) <= 1e-12
        ok &= P.l2_norm() <= f.l2_norm() + 1e-12
    checks.append(_check("projection_invariants", descriptor, ok, min_gap=str(worst_gap)))

    stats = ["weak", "opnorm"] + (["four"] if n <= cfg.four_max_order else [])
    for stat in stats:
        rows = []
        for trial in range(cfg.trials):
            rows += stat_rows(G, D, stat, trial, cfg.seed, classes=classes)
        for name in dict.fromkeys(r["stat"] for r in rows):
            sel = [r for r in rows if r["stat"] == name]
            checks.append(_check(name, descriptor, all(r["satisfied"] for r in sel),
                                 trials=len(sel),
                                 max_deviation=max(float(r["deviation"]) for r in sel)))

    if n <= pat.CUBIC_MAX_ORDER:
        rng = rng_for(descriptor, cfg.seed, 0, "patterns")
        ok = graph_ok = multi_ok = True
        for _ in range(max(cfg.trials, 1)):
            A = random_subset(G, cfg.density, rng)
            direct = pat.count_triple_pattern(G, A).count
            ok &= pat.count_triple_via_change_of_variables(G, A).count == direct
            graph = pat.build_tripartite_graph(G, A)
            graph_ok &= (graph.triangles == n * direct and graph.family_valid
                         and graph.family_edge_disjoint and graph.family_size == A.size * n)
            multi = pat.count_multi_pattern(G, pat.TupleSet.from_subset(A), 1)
            multi_ok &= multi.count == direct
        checks.append(_check("change_of_variables", descriptor, ok))
        checks.append(_check("tripartite_triangles", descriptor, graph_ok))
        checks.append(_check("multi_k1_equivalence", descriptor, multi_ok))
    for k in (2, 3):
        if n ** (k + 1) <= min(cfg.iteration_budget, 10**6):
            A = pat.TupleSet.random(G, k, cfg.density, rng_for(descriptor, cfg.seed, k, "slices"))
            s = pat.build_simplex_slices(G, A, k)
            checks.append(_check(f"simplex_slices_k{k}", descriptor, s.correspondence_holds,
                                 count=s.intersection_count))
    return checks


def verify_all(cfg: ExperimentConfig) -> dict:
    """Every structural identity and explicit-constant bound on every group in
    the fleet; ``passed`` is False if any single check fails."""
    groups = cfg.groups or list(DEFAULT_FLEET)
    checks = []
    for d in groups:
        try:
            checks += verify_group(d, cfg)
        except Exception as exc:
            log.error("verification of %s failed: %s", d, exc)
            checks.append(_check("run", d, False, error=f"{type(exc).__name__}: {exc}"))
    return {"schema_version": SCHEMA_VERSION, "seed": cfg.seed, "groups": groups,
            "passed": all(c["passed"] for c in checks), "checks": checks}
