"""Command line interface.

Subcommands:
  train      fit one model (one seed), dump scores and a checkpoint
  bench      multi-seed protocol: train, score, evaluate, aggregate
  sweep      repeat bench over an alpha / beta / cluster-count grid
  synth      generate a synthetic CSV + schema pair
  eval       metrics for an existing score dump against a labeled CSV
  gradcheck  finite-difference validation of the training gradients

Output directory precedence: --out flag, then the config file's output_dir,
then $DCFOD_OUTPUT_DIR, then ./runs. Exit codes: 0 success, 1 runtime
failure (diagnostic on stderr), 2 usage errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from .data import (
    DatasetSchema,
    LoadError,
    SyntheticConfig,
    load_csv,
    write_synthetic_csv,
)
from .harness import (
    ExperimentConfig,
    read_scores,
    run_experiment,
    run_sweep,
)
from .metrics import UndefinedMetricError, evaluate, f_rank
from .model import TrainConfig, gradient_check_suite

logger = logging.getLogger("dcfod")

ENV_OUTPUT_DIR = "DCFOD_OUTPUT_DIR"


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="experiment config file (JSON)")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--mode", choices=("full", "dcod", "no_adversary", "no_weights"),
                        help="override training mode")
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--quiet", action="store_true", help="warnings only")
    group.add_argument("--verbose", action="store_true", help="debug logging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcfod",
        description="Deep-clustering outlier detection with subgroup debiasing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="single-seed training run")
    _add_common(p_train)
    p_train.add_argument("--data", help="CSV data file (overrides config)")
    p_train.add_argument("--schema", help="schema JSON for --data")
    p_train.add_argument("--seed", type=int, help="training seed")

    p_bench = sub.add_parser("bench", help="multi-seed benchmark run")
    _add_common(p_bench)
    p_bench.add_argument("--data", help="CSV data file (overrides config)")
    p_bench.add_argument("--schema", help="schema JSON for --data")
    p_bench.add_argument("--seeds", type=int, help="number of seeds (0..N-1)")
    p_bench.add_argument("--seed-list", help="explicit comma-separated seed list")

    p_sweep = sub.add_parser("sweep", help="grid sweep over alpha/beta/k")
    _add_common(p_sweep)
    p_sweep.add_argument("--axis", choices=("alpha", "beta", "k"), help="sweep axis")
    p_sweep.add_argument("--values", help="comma-separated grid values")
    p_sweep.add_argument("--seeds", type=int, help="number of seeds (0..N-1)")

    p_synth = sub.add_parser("synth", help="generate a synthetic dataset")
    p_synth.add_argument("--n", type=int, default=1000, help="number of rows")
    p_synth.add_argument("--features", type=int, default=10)
    p_synth.add_argument("--clusters", type=int, default=4)
    p_synth.add_argument("--rate", type=float, default=0.1, help="outlier rate")
    p_synth.add_argument("--bias", type=float, default=0.0,
                         help="subgroup/outlier association strength")
    p_synth.add_argument("--shift", type=float, default=0.0,
                         help="subgroup feature shift")
    p_synth.add_argument("--noise", type=float, default=0.0,
                         help="extra inlier noise for the last subgroup")
    p_synth.add_argument("--subgroups", type=int, default=2)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", help="output directory")
    p_synth.add_argument("--quiet", action="store_true")
    p_synth.add_argument("--verbose", action="store_true")

    p_eval = sub.add_parser("eval", help="evaluate an existing score dump")
    p_eval.add_argument("--scores", required=True, help="score dump file")
    p_eval.add_argument("--data", required=True, help="CSV data file")
    p_eval.add_argument("--schema", required=True, help="schema JSON")
    p_eval.add_argument("--out", help="optional directory for metrics.json")
    p_eval.add_argument("--quiet", action="store_true")
    p_eval.add_argument("--verbose", action="store_true")

    p_grad = sub.add_parser("gradcheck", help="finite-difference gradient check")
    p_grad.add_argument("--seed", type=int, default=0)
    p_grad.add_argument("--tolerance", type=float, default=1e-4)
    p_grad.add_argument("--quiet", action="store_true")
    p_grad.add_argument("--verbose", action="store_true")

    return parser


def _setup_logging(args) -> None:
    level = logging.INFO
    if getattr(args, "quiet", False):
        level = logging.WARNING
    elif getattr(args, "verbose", False):
        level = logging.DEBUG
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def _resolve_out(args, config: ExperimentConfig | None) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    if config is not None and config.output_dir:
        return Path(config.output_dir)
    env = os.environ.get(ENV_OUTPUT_DIR)
    if env:
        return Path(env)
    return Path("runs")


def _experiment_from_args(args, default_seeds: list[int]) -> ExperimentConfig:
    """Merge config file and CLI flags (flags win)."""
    if getattr(args, "config", None):
        config = ExperimentConfig.load(args.config)
    else:
        if not (getattr(args, "data", None) and getattr(args, "schema", None)):
            raise LoadError("either --config or both --data and --schema are required")
        config = ExperimentConfig(
            name=Path(args.data).stem,
            train=TrainConfig(),
            seeds=default_seeds,
            csv_path=args.data,
            schema_path=args.schema,
        )
    if getattr(args, "data", None):
        config = dataclasses.replace(
            config,
            csv_path=args.data,
            schema_path=args.schema or config.schema_path,
            synthetic=None,
        )
    if getattr(args, "mode", None):
        config = dataclasses.replace(
            config, train=dataclasses.replace(config.train, mode=args.mode)
        )
    if getattr(args, "seed", None) is not None:
        config = dataclasses.replace(config, seeds=[args.seed])
    if getattr(args, "seeds", None) is not None:
        config = dataclasses.replace(config, seeds=list(range(args.seeds)))
    if getattr(args, "seed_list", None):
        config = dataclasses.replace(
            config, seeds=[int(s) for s in args.seed_list.split(",")]
        )
    return config


def _print_summary(out_dir: Path) -> None:
    summary = out_dir / "summary.txt"
    if summary.exists():
        print(summary.read_text(), end="")


def cmd_train(args) -> int:
    config = _experiment_from_args(args, default_seeds=[0])
    if len(config.seeds) != 1:
        config = dataclasses.replace(config, seeds=config.seeds[:1])
    out_dir = _resolve_out(args, config)
    record = run_experiment(config, out_dir)
    if record.n_failed:
        print(record.seed_results[0].error, file=sys.stderr)
        return 1
    _print_summary(out_dir)
    print(f"artifacts in {out_dir}")
    return 0


def cmd_bench(args) -> int:
    config = _experiment_from_args(args, default_seeds=list(range(20)))
    dataset = config.load_dataset()
    if dataset.labels is None:
        print(
            "bench needs ground-truth labels; schema declares no label column",
            file=sys.stderr,
        )
        return 1
    out_dir = _resolve_out(args, config)
    record = run_experiment(config, out_dir)
    _print_summary(out_dir)
    print(f"artifacts in {out_dir}")
    return 0 if record.n_failed == 0 else 1


def cmd_sweep(args) -> int:
    config = _experiment_from_args(args, default_seeds=list(range(5)))
    if getattr(args, "axis", None):
        values = [float(v) for v in (args.values or "").split(",") if v != ""]
        config = dataclasses.replace(config, sweep_axis=args.axis, sweep_values=values)
    if config.sweep_axis is not None and not config.sweep_values:
        print("sweep needs --values (or sweep_values in the config)", file=sys.stderr)
        return 1
    out_dir = _resolve_out(args, config)
    run_sweep(config, out_dir)
    sweep_summary = out_dir / "sweep_summary.txt"
    if sweep_summary.exists():
        print(sweep_summary.read_text(), end="")
    else:
        _print_summary(out_dir)
    print(f"artifacts in {out_dir}")
    return 0


def cmd_synth(args) -> int:
    cfg = SyntheticConfig(
        n_samples=args.n,
        n_features=args.features,
        n_clusters=args.clusters,
        outlier_rate=args.rate,
        subgroup_bias=args.bias,
        subgroup_shift=args.shift,
        subgroup_noise=args.noise,
        n_subgroups=args.subgroups,
        seed=args.seed,
    )
    out_dir = _resolve_out(args, None)
    out_dir.mkdir(parents=True, exist_ok=True)
    data_path = out_dir / "data.csv"
    schema_path = out_dir / "schema.json"
    write_synthetic_csv(cfg, data_path, schema_path)
    print(f"wrote {data_path} and {schema_path}")
    return 0


def cmd_eval(args) -> int:
    scores = read_scores(args.scores)
    dataset = load_csv(args.data, DatasetSchema.load(args.schema))
    if len(scores) != dataset.n_samples:
        print(
            f"score dump has {len(scores)} rows, dataset has {dataset.n_samples}",
            file=sys.stderr,
        )
        return 1
    if dataset.labels is None:
        drift, _ = f_rank(scores, dataset.subgroups)
        print(f"f_rank: {drift:.6f} (no label column: AUC/F_Gap unavailable)")
        return 0
    report = evaluate(scores, dataset.labels, dataset.subgroups)
    print(f"auc:    {report.auc:.6f}")
    for group, value in sorted(report.subgroup_auc.items()):
        print(f"  subgroup {group}: {value:.6f}")
    print(f"f_gap:  {report.f_gap:.6f}")
    print(f"f_rank: {report.f_rank:.6f}")
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "metrics.json").write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
        )
    return 0


def cmd_gradcheck(args) -> int:
    reports = gradient_check_suite(seed=args.seed, tolerance=args.tolerance)
    ok = True
    for name, report in reports.items():
        status = "pass" if report.passed else "FAIL"
        print(f"{name:15s} {status}  max rel err {report.max_rel_error:.3e} "
              f"(tolerance {report.tolerance:g})")
        ok = ok and report.passed
    return 0 if ok else 1


_COMMANDS = {
    "train": cmd_train,
    "bench": cmd_bench,
    "sweep": cmd_sweep,
    "synth": cmd_synth,
    "eval": cmd_eval,
    "gradcheck": cmd_gradcheck,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging(args)
    try:
        return _COMMANDS[args.command](args)
    except (LoadError, UndefinedMetricError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
