"""Command-line entry points wiring generation, evaluation, optimization and
rankings into reproducible runs.

Every subcommand is a pure function of its flags: outputs (including a
config.json echo) are byte-identical when rerun with the same inputs and
seed. Errors exit nonzero with a single-line diagnostic.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import classifiers, pso, unpredictability
from .data import load_dataset, write_matches, write_snapshots
from .dls import OverFilter, default_table, evaluate, load_table, save_table
from .synth import synth_corpus

CHECKPOINTS = (10, 20, 30, 40)
RANGES = ((0, 10), (10, 20), (20, 30), (30, 40), (40, 50), (0, 50), (20, 50))


def _table_selections() -> list[OverFilter]:
    return [OverFilter.checkpoint(k) for k in CHECKPOINTS] + [
        OverFilter.span(lo, hi) for lo, hi in RANGES
    ]


def _pct(fraction: float) -> str:
    return f"{fraction * 100.0:.2f}"


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _echo_config(args, out: Path) -> None:
    payload = {
        k: (str(v) if isinstance(v, Path) else v)
        for k, v in vars(args).items()
        if k != "func"
    }
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    (out / "config.json").write_text(text, encoding="utf-8")


def _write_rows(path: Path, header, rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _dataset(args):
    if not args.matches or not args.snapshots:
        raise ValueError("--matches and --snapshots are required")
    return load_dataset(args.matches, args.snapshots)


def _table(args):
    return load_table(args.table) if args.table else default_table()


def cmd_synth(args) -> None:
    out = _out_dir(args)
    dataset = synth_corpus(
        seed=args.seed,
        n_matches=args.n,
        table=_table(args),
        disagree_frac=args.disagree_frac,
    )
    write_matches(out / "matches.csv", dataset.matches)
    write_snapshots(out / "snapshots.csv", dataset.snapshots)
    _echo_config(args, out)
    print(f"wrote {len(dataset.matches)} matches, {len(dataset.snapshots)} snapshots to {out}")


def _hyperparams(args) -> classifiers.Hyperparams:
    return classifiers.Hyperparams(
        nb_var_floor=args.nb_var_floor,
        nn_hidden=args.nn_hidden,
        nn_learning_rate=args.nn_lr,
        nn_epochs=args.nn_epochs,
        nn_batch=args.nn_batch,
        bag_rounds=args.bag_rounds,
        rf_trees=args.rf_trees,
        rf_feature_subset=args.rf_feature_subset,
        rf_min_leaf=args.rf_min_leaf,
        rf_max_depth=args.rf_max_depth,
    )


def cmd_evaluate(args) -> None:
    out = _out_dir(args)
    dataset = _dataset(args)
    table = _table(args)
    selections = _table_selections()
    result = classifiers.evaluate_protocol(
        dataset,
        table,
        selections,
        seed=args.seed,
        params=_hyperparams(args),
        jobs=args.jobs,
    )

    checkpoint_labels = {OverFilter.checkpoint(k).label for k in CHECKPOINTS}
    shaped_header = ["test_samples", "selection", "dl_accuracy", "classifier_accuracy", "model"]
    shaped = {True: [], False: []}
    for row in result.best:
        shaped[row.selection in checkpoint_labels].append(
            [row.n_test, row.selection, _pct(row.dl_accuracy), _pct(row.accuracy), row.kind.value]
        )
    _write_rows(out / "evaluate_checkpoints.csv", shaped_header, shaped[True])
    _write_rows(out / "evaluate_ranges.csv", shaped_header, shaped[False])
    _write_rows(
        out / "evaluate_models.csv",
        ["selection", "n_samples", "dl_accuracy", "kind", "classifier_accuracy"],
        [
            [r.selection, r.n_test, f"{r.dl_accuracy:.4f}", r.kind.value, f"{r.accuracy:.4f}"]
            for r in result.rows
        ],
    )
    _echo_config(args, out)
    print(f"wrote evaluation tables to {out}")


def cmd_optimize(args) -> None:
    out = _out_dir(args)
    dataset = _dataset(args)
    base = _table(args)
    config = pso.PsoConfig(
        swarm_size=args.swarm,
        c1=args.c1,
        c2=args.c2,
        generations=args.generations,
        inertia=args.inertia,
        v_max=args.vmax,
        seed=args.seed,
        mode=pso.Mode(args.mode),
        constrained=not args.unconstrained,
        enforce_cross_wicket=args.enforce_cross_wicket,
    )
    result = pso.optimize(dataset, base, config, jobs=args.jobs)
    save_table(out / "optimized_table.csv", result.optimized_table)

    rows = []
    for selection in _table_selections():
        base_report = evaluate(dataset, base, selection)
        opt_report = evaluate(dataset, result.optimized_table, selection)
        rows.append(
            [
                selection.label,
                base_report.n_samples,
                _pct(base_report.accuracy),
                _pct(opt_report.accuracy),
            ]
        )
    _write_rows(
        out / "optimize_comparison.csv",
        ["selection", "n_samples", "base_accuracy", "optimized_accuracy"],
        rows,
    )
    _echo_config(args, out)
    print(
        f"fitness {result.baseline_fitness} -> {result.optimized_fitness}; "
        f"wrote optimized table and comparison to {out}"
    )


def cmd_index(args) -> None:
    out = _out_dir(args)
    dataset = _dataset(args)
    table = _table(args)
    for scenario in unpredictability.Scenario:
        ranking = unpredictability.rank_teams(
            dataset, table, scenario, min_matches=args.min_matches
        )
        rows = [
            [
                scenario.value,
                score.team,
                score.failing_count,
                score.scenario_total,
                _pct(score.percentage),
                rank,
            ]
            for rank, score in enumerate(ranking.scores, start=1)
        ]
        _write_rows(
            out / f"ranking_{scenario.value}.csv",
            ["scenario", "team", "failing_count", "scenario_total", "percentage", "rank"],
            rows,
        )
    _echo_config(args, out)
    print(f"wrote four ranking tables to {out}")


def cmd_validate_table(args) -> None:
    if not args.table:
        raise ValueError("--table is required")
    load_table(args.table)
    print(f"table {args.table} is valid")


def _add_common(sub: argparse.ArgumentParser, need_out=True) -> None:
    sub.add_argument("--matches", type=Path, help="matches.csv path")
    sub.add_argument("--snapshots", type=Path, help="snapshots.csv path")
    sub.add_argument("--table", type=Path, help="resource table CSV (default: bundled)")
    sub.add_argument("--seed", type=int, default=0)
    if need_out:
        sub.add_argument("--out", type=Path, required=True, help="output directory")
    sub.add_argument("--jobs", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dlsuite",
        description="Par-score prediction, table optimization and team rankings for ODI chases",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("synth", help="generate a deterministic synthetic corpus")
    _add_common(p)
    p.add_argument("--n", type=int, required=True, help="number of matches")
    p.add_argument(
        "--disagree-frac",
        type=float,
        default=0.2,
        help="target share of matches whose 40th-over prediction misses the result",
    )
    p.set_defaults(func=cmd_synth)

    p = subs.add_parser("evaluate", help="classifier suite vs the par-score baseline")
    _add_common(p)
    p.add_argument("--nb-var-floor", type=float, default=1e-9)
    p.add_argument("--nn-hidden", type=int, default=8)
    p.add_argument("--nn-lr", type=float, default=0.1)
    p.add_argument("--nn-epochs", type=int, default=200)
    p.add_argument("--nn-batch", type=int, default=32)
    p.add_argument("--bag-rounds", type=int, default=25)
    p.add_argument("--rf-trees", type=int, default=100)
    p.add_argument("--rf-feature-subset", type=int, default=3)
    p.add_argument("--rf-min-leaf", type=int, default=2)
    p.add_argument("--rf-max-depth", type=int, default=None)
    p.set_defaults(func=cmd_evaluate)

    p = subs.add_parser("optimize", help="re-fit resource values for wickets 0..3")
    _add_common(p)
    p.add_argument("--mode", choices=[m.value for m in pso.Mode], default="per-cell")
    p.add_argument("--generations", type=int, default=50)
    p.add_argument("--swarm", type=int, default=10)
    p.add_argument("--c1", type=float, default=2.0)
    p.add_argument("--c2", type=float, default=2.5)
    p.add_argument("--inertia", type=float, default=0.7)
    p.add_argument("--vmax", type=float, default=0.2)
    p.add_argument(
        "--unconstrained",
        action="store_true",
        help="drop the decreasing condition (study variant; output skips validation)",
    )
    p.add_argument(
        "--enforce-cross-wicket",
        action="store_true",
        help="also keep each column within its wicket neighbours during assembly",
    )
    p.set_defaults(func=cmd_optimize)

    p = subs.add_parser("index", help="rank teams by 40th-over prediction failures")
    _add_common(p)
    p.add_argument("--min-matches", type=int, default=40)
    p.set_defaults(func=cmd_index)

    p = subs.add_parser("validate-table", help="check a resource table file")
    _add_common(p, need_out=False)
    p.set_defaults(func=cmd_validate_table)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
