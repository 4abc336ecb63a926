"""Command-line entry point.

Exit codes: 0 success, 1 a check or bound failed, 2 usage error,
3 a size or iteration cap was hit. Data goes to stdout (or --out);
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import patterns as pat
from .characters import cached_character_degrees, character_degrees
from .conjugacy import commuting_pairs, conjugacy_classes
from .experiments import (STATS, ConfigError, ExperimentConfig, load_config, rows_to_csv,
                          run_sweep, stat_rows, summarise, verify_all)
from .functions import DEFAULT_SEED, load_subset, random_subset, rng_for
from .groups import CapExceeded, GroupSpecError, check_group_axioms, parse_group
from .spectral import cayley_operator_norm

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

log = logging.getLogger("qrlab")


class UsageError(Exception):
    pass


def _emit(args, payload) -> None:
    if isinstance(payload, str):
        text = payload
    else:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _group(args):
    return parse_group(args.descriptor, args.max_order)


def cmd_group(args) -> int:
    G = _group(args)
    ok = check_group_axioms(G)
    _emit(args, {"descriptor": G.descriptor, "order": G.order, "abelian": G.is_abelian,
                 "exponent": G.exponent, "axioms_ok": ok, "note": getattr(G, "note", ""),
                 "table_materialized": G.table is not None})
    return EXIT_OK if ok else EXIT_CHECK


def cmd_classes(args) -> int:
    G = _group(args)
    C = conjugacy_classes(G)
    cp = commuting_pairs(G)
    ok = cp == G.order * C.class_count
    _emit(args, {"descriptor": G.descriptor, "order": G.order, "class_count": C.class_count,
                 "class_sizes": list(C.class_sizes), "commuting_pairs": cp, "burnside_ok": ok})
    return EXIT_OK if ok else EXIT_CHECK


def cmd_chartab(args) -> int:
    G = _group(args)
    table = character_degrees(G) if args.no_cache else cached_character_degrees(G)
    out = table.to_json()
    out["sum_of_squares"] = table.sum_of_squares()
    out["sum_check"] = table.sum_of_squares() == G.order
    _emit(args, out)
    return EXIT_OK if out["sum_check"] else EXIT_CHECK


def _rows_out(args, rows) -> None:
    if args.format == "json":
        _emit(args, {"schema_version": 1, "rows": rows, "summary": summarise(rows)})
    else:
        _emit(args, rows_to_csv(rows))


def cmd_mix(args) -> int:
    G = _group(args)
    classes = conjugacy_classes(G)
    D = cached_character_degrees(G, classes=classes).quasirandomness_degree
    rows = []
    for trial in range(args.trials):
        rows += stat_rows(G, D, args.stat, trial, args.seed, classes=classes,
                          density=args.density, eps=args.eps, samples=args.samples)
    _rows_out(args, rows)
    return EXIT_CHECK if any(r["satisfied"] is False for r in rows) else EXIT_OK


def cmd_patterns(args) -> int:
    G = _group(args)
    kind = args.pattern
    rows = []
    for trial in range(args.trials):
        rng = rng_for(G.descriptor, args.seed, trial, f"patterns:{kind}")
        if args.subset_file:
            try:
                A = load_subset(G, args.subset_file)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
        else:
            A = random_subset(G, args.density, rng)
        base = {"schema_version": 1, "group": G.descriptor, "order": G.order, "trial": trial,
                "seed": args.seed, "pattern": kind}
        if kind == "triple":
            c = pat.count_triple_pattern(G, A)
            rows.append({**base, "count": c.count, "normalizer": c.normalizer, "extra": ""})
        elif kind == "schur":
            B, C = random_subset(G, args.density, rng), random_subset(G, args.density, rng)
            c = pat.count_schur_quadruples(G, A, B, C)
            rows.append({**base, "count": c.count, "normalizer": c.normalizer,
                         "extra": c.distinct_count})
        elif kind == "best-g":
            g, c = pat.best_recurrence_element(G, A)
            rows.append({**base, "count": c, "normalizer": G.order, "extra": g})
        elif kind.startswith("multi:"):
            k = int(kind.split(":", 1)[1])
            At = pat.TupleSet.random(G, k, args.density, rng)
            c = pat.count_multi_pattern(G, At, k, with_conjugated=not args.plain)
            rows.append({**base, "count": c.count, "normalizer": c.normalizer, "extra": At.size})
        elif kind == "coloring":
            scores = pat.schur_colouring_scores(G, args.colors, 1, rng)
            rows.append({**base, "count": "", "normalizer": "", "extra": repr(scores[0])})
    fields = ["schema_version", "group", "order", "trial", "seed", "pattern", "count",
              "normalizer", "extra"]
    if args.format == "json":
        _emit(args, {"schema_version": 1, "rows": rows})
    else:
        lines = [",".join(fields)] + [",".join(str(r[f]) for f in fields) for r in rows]
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_spectral(args) -> int:
    G = _group(args)
    rows = []
    for i in range(args.pairs):
        rng = rng_for(G.descriptor, args.seed, i, "spectral")
        a, b = (int(v) for v in rng.integers(0, G.order, size=2))
        r = cayley_operator_norm(G, a, b, seed=i)
        rows.append({"schema_version": 1, "group": G.descriptor, "pair": i, "a": a, "b": b,
                     "norm": repr(r.operator_norm), "gap": repr(r.gap),
                     "generated": str(r.generated).lower(), "iterations": r.iterations,
                     "converged": str(r.converged).lower()})
    if args.format == "json":
        _emit(args, {"schema_version": 1, "rows": rows})
    else:
        fields = list(rows[0]) if rows else ["schema_version", "group", "pair", "a", "b", "norm",
                                             "gap", "generated", "iterations", "converged"]
        lines = [",".join(fields)] + [",".join(str(r[f]) for f in fields) for r in rows]
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if all(r["converged"] == "true" for r in rows) else EXIT_CHECK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.seed_given:
        cfg.seed = args.seed
    rows = run_sweep(cfg)
    log.info("wrote %d rows to %s", len(rows), cfg.out_dir)
    meta = json.loads((Path(cfg.out_dir) / "sweep.meta.json").read_text())
    failed = [g["descriptor"] for g in meta["groups"] if g["error"]]
    if failed:
        print(f"qrlab: groups failed: {', '.join(failed)}", file=sys.stderr)
    if failed or any(r["satisfied"] is False for r in rows):
        return EXIT_CHECK
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = load_config(args.config) if args.config else ExperimentConfig(trials=8)
    if args.seed_given:
        cfg.seed = args.seed
    if args.max_order is not None:
        cfg.max_order = args.max_order
    report = verify_all(cfg)
    _emit(args, report)
    return EXIT_OK if report["passed"] else EXIT_CHECK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


class _SeedAction(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None):
        namespace.seed = values
        namespace.seed_given = True


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, action=_SeedAction,
                        help=f"base seed for all random draws (default {DEFAULT_SEED})")
    common.add_argument("--out", help="write the data payload here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="payload format for tabular commands")
    common.add_argument("--max-order", type=int, default=None,
                        help="refuse to build groups larger than this")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")

    p = _Parser(prog="qrlab", description="Quasirandom group laboratory.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_, descriptor=True):
        sp = sub.add_parser(name, parents=[common], help=help_, description=help_)
        if descriptor:
            sp.add_argument("descriptor",
                            help="cyclic:n, sym:n, alt:n, sl2:p or prod(<d1>,<d2>)")
        sp.set_defaults(func=func, seed_given=False)
        return sp

    add("group", cmd_group, "build a group and check the group axioms")
    add("classes", cmd_classes, "conjugacy classes and the Burnside commuting-pair check")
    sp = add("chartab", cmd_chartab, "irreducible character degrees and the degree D")
    sp.add_argument("--no-cache", action="store_true", help="bypass the character cache")

    sp = add("mix", cmd_mix, "mixing statistics over seeded random inputs")
    sp.add_argument("--stat", choices=STATS, required=True)
    sp.add_argument("--trials", type=int, default=32)
    sp.add_argument("--density", type=float, default=0.5, help="subset density for --stat triple")
    sp.add_argument("--eps", type=float, default=0.05, help="epsilon for --stat triple")
    sp.add_argument("--samples", type=int, default=0,
                    help="Monte Carlo draws for the --stat quad cross-check")

    sp = add("patterns", cmd_patterns, "exact recurrence-pattern counts")
    sp.add_argument("--pattern", required=True,
                    help="triple | schur | best-g | multi:k (k=1,2,3) | coloring")
    sp.add_argument("--density", type=float, default=0.5)
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--subset-file", help="element indices of A, one per line")
    sp.add_argument("--plain", action="store_true",
                    help="multi:k without the conjugated constraint")
    sp.add_argument("--colors", type=int, default=2, help="colour count for --pattern coloring")

    sp = add("spectral", cmd_spectral, "Cayley averaging-operator norms for random pairs")
    sp.add_argument("--pairs", type=int, default=100)

    sp = add("sweep", cmd_sweep, "run a configured sweep", descriptor=False)
    sp.add_argument("--config", required=True, help="flat key = value config file")
    sp = add("verify", cmd_verify, "run the full verification gate", descriptor=False)
    sp.add_argument("--config", help="flat key = value config file (default fleet if omitted)")
    return p


def _validate(args) -> None:
    if getattr(args, "pattern", None):
        ok = args.pattern in ("triple", "schur", "best-g", "coloring") or (
            args.pattern.startswith("multi:") and args.pattern[6:] in ("1", "2", "3"))
        if not ok:
            raise UsageError(f"unknown pattern {args.pattern!r}")
    for name in ("trials", "pairs", "samples"):
        if getattr(args, name, 0) is not None and getattr(args, name, 0) < 0:
            raise UsageError(f"--{name} must be non-negative")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(args)
    except UsageError as exc:
        print(f"qrlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    if args.format is None:
        args.format = "json" if args.command in ("group", "classes", "chartab", "verify") else "csv"
    try:
        return args.func(args)
    except (GroupSpecError, ConfigError, UsageError, FileNotFoundError) as exc:
        print(f"qrlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"qrlab: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
