"""Config-driven experiment runner.

An experiment names a dataset (a CSV/schema pair or a synthetic generator
config), a training configuration, and a list of seeds. Running it trains
one model per seed, persists a score dump and a checkpoint per seed,
evaluates validity and fairness metrics when labels are available, and
aggregates mean and standard deviation across seeds. Sweeps repeat the
experiment over a grid of alpha, beta, or cluster-count values.

Reports are split into a deterministic part (results.json and the aligned
summary table, byte-identical across reruns of the same experiment) and a
timings.json sidecar holding wall-clock numbers, which are the one
non-reproducible output.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import Dataset, DatasetSchema, SyntheticConfig, load_csv, make_synthetic
from .metrics import MetricReport, evaluate
from .model import TrainConfig, fit, save_checkpoint

logger = logging.getLogger(__name__)

SWEEP_AXES = ("alpha", "beta", "k")
RESULTS_FILE = "results.json"
SUMMARY_FILE = "summary.txt"
TIMINGS_FILE = "timings.json"


@dataclass
class ExperimentConfig:
    """One experiment: dataset source, training config, seeds, output."""

    name: str
    train: TrainConfig
    seeds: list[int]
    csv_path: str | None = None
    schema_path: str | None = None
    synthetic: SyntheticConfig | None = None
    output_dir: str | None = None
    sweep_axis: str | None = None
    sweep_values: list[float] | None = None

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("seed list must be non-empty")
        has_csv = self.csv_path is not None
        if has_csv == (self.synthetic is not None):
            raise ValueError("exactly one of csv_path or synthetic must be given")
        if has_csv and self.schema_path is None:
            raise ValueError("csv_path requires schema_path")
        if self.sweep_axis is not None:
            if self.sweep_axis not in SWEEP_AXES:
                raise ValueError(f"sweep axis must be one of {SWEEP_AXES}")
            if not self.sweep_values:
                raise ValueError("sweep axis set but value grid is empty")

    def load_dataset(self) -> Dataset:
        if self.synthetic is not None:
            return make_synthetic(self.synthetic)
        schema = DatasetSchema.load(self.schema_path)
        return load_csv(self.csv_path, schema)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "train": self.train.to_dict(),
            "seeds": list(self.seeds),
            "csv_path": self.csv_path,
            "schema_path": self.schema_path,
            "synthetic": dataclasses.asdict(self.synthetic) if self.synthetic else None,
            "output_dir": self.output_dir,
            "sweep_axis": self.sweep_axis,
            "sweep_values": list(self.sweep_values) if self.sweep_values else None,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        doc = dict(doc)
        sweep = doc.pop("sweep", None)
        if sweep is not None:
            doc.setdefault("sweep_axis", sweep.get("axis"))
            doc.setdefault("sweep_values", sweep.get("values"))
        synthetic = doc.get("synthetic")
        if synthetic is not None:
            synthetic = SyntheticConfig(**synthetic)
        train = TrainConfig.from_dict(doc.get("train", {}))
        return cls(
            name=doc.get("name", "experiment"),
            train=train,
            seeds=[int(s) for s in doc.get("seeds", [0])],
            csv_path=doc.get("csv_path") or doc.get("csv"),
            schema_path=doc.get("schema_path") or doc.get("schema"),
            synthetic=synthetic,
            output_dir=doc.get("output_dir"),
            sweep_axis=doc.get("sweep_axis"),
            sweep_values=doc.get("sweep_values"),
        )

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class SeedResult:
    seed: int
    metrics: MetricReport | None
    score_path: str | None
    checkpoint_path: str | None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "metrics": self.metrics.to_dict() if self.metrics else None,
            "score_path": self.score_path,
            "checkpoint_path": self.checkpoint_path,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SeedResult":
        metrics = doc.get("metrics")
        return cls(
            seed=doc["seed"],
            metrics=MetricReport.from_dict(metrics) if metrics else None,
            score_path=doc.get("score_path"),
            checkpoint_path=doc.get("checkpoint_path"),
            error=doc.get("error"),
        )


@dataclass
class RunRecord:
    """Everything one experiment produced, minus wall-clock timings."""

    name: str
    config: dict
    seed_results: list[SeedResult]
    aggregates: dict[str, dict[str, float]]
    n_failed: int
    wall_clock: dict[int, float] = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "config": self.config,
            "seed_results": [r.to_dict() for r in self.seed_results],
            "aggregates": self.aggregates,
            "n_failed": self.n_failed,
        }

    @classmethod
    def from_dict(cls, doc: dict, wall_clock: dict[int, float] | None = None) -> "RunRecord":
        return cls(
            name=doc["name"],
            config=doc["config"],
            seed_results=[SeedResult.from_dict(r) for r in doc["seed_results"]],
            aggregates=doc["aggregates"],
            n_failed=doc["n_failed"],
            wall_clock=wall_clock or {},
        )


def _aggregate(seed_results: list[SeedResult]) -> dict[str, dict[str, float]]:
    """Mean and population stdev per metric over successful seeds."""
    rows = [r.metrics for r in seed_results if r.metrics is not None]
    if not rows:
        return {}
    out = {}
    for key in ("auc", "f_gap", "f_rank"):
        values = np.array([getattr(m, key) for m in rows])
        out[key] = {"mean": float(values.mean()), "std": float(values.std())}
    return out


def write_scores(scores: np.ndarray, path: str | Path) -> None:
    """Score dump: a header line then one full-precision score per row."""
    lines = ["score"] + [repr(float(s)) for s in scores]
    Path(path).write_text("\n".join(lines) + "\n")


def read_scores(path: str | Path) -> np.ndarray:
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0].strip() != "score":
        raise ValueError(f"{path} is not a score dump (missing 'score' header)")
    return np.array([float(v) for v in lines[1:]])


def run_experiment(config: ExperimentConfig, out_dir: str | Path) -> RunRecord:
    """Train one model per seed, persist artifacts, aggregate metrics.

    A seed whose training fails is recorded with its error message rather
    than dropped; aggregation covers the successful seeds only.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset = config.load_dataset()
    logger.info(
        "experiment %s: %d rows, %d features, %d subgroups, labels=%s",
        config.name, dataset.n_samples, dataset.n_features, dataset.n_subgroups,
        dataset.labels is not None,
    )
    seed_results: list[SeedResult] = []
    wall_clock: dict[int, float] = {}
    for seed in sorted(config.seeds):
        train_cfg = dataclasses.replace(config.train, seed=seed)
        started = time.perf_counter()
        try:
            result = fit(dataset.x, dataset.subgroups, train_cfg)
            score_path = out_dir / f"scores_seed{seed}.csv"
            write_scores(result.scores, score_path)
            checkpoint_path = out_dir / f"checkpoint_seed{seed}.npz"
            save_checkpoint(result.model, train_cfg, checkpoint_path)
        except Exception as exc:  # noqa: BLE001 - failed seeds are recorded
            logger.warning("seed %d failed: %s", seed, exc)
            seed_results.append(
                SeedResult(
                    seed=seed,
                    metrics=None,
                    score_path=None,
                    checkpoint_path=None,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
            wall_clock[seed] = time.perf_counter() - started
            continue
        # artifacts exist from here on; an evaluation failure keeps them
        metrics = None
        error = None
        if dataset.labels is not None:
            try:
                metrics = evaluate(result.scores, dataset.labels, dataset.subgroups)
            except Exception as exc:  # noqa: BLE001
                logger.warning("seed %d: evaluation failed: %s", seed, exc)
                error = f"{type(exc).__name__}: {exc}"
        seed_results.append(
            SeedResult(
                seed=seed,
                metrics=metrics,
                score_path=score_path.name,
                checkpoint_path=checkpoint_path.name,
                error=error,
            )
        )
        wall_clock[seed] = time.perf_counter() - started
    record = RunRecord(
        name=config.name,
        config=config.to_dict(),
        seed_results=seed_results,
        aggregates=_aggregate(seed_results),
        n_failed=sum(1 for r in seed_results if r.error is not None),
        wall_clock=wall_clock,
    )
    emit_report([record], out_dir)
    return record


def _apply_sweep_value(config: ExperimentConfig, value: float) -> ExperimentConfig:
    axis = config.sweep_axis
    if axis == "alpha":
        train = dataclasses.replace(config.train, alpha=float(value))
    elif axis == "beta":
        train = dataclasses.replace(config.train, beta=float(value))
    else:
        train = dataclasses.replace(config.train, n_clusters=int(value))
    label = f"{config.name}_{axis}_{_format_value(value)}"
    return dataclasses.replace(
        config, train=train, name=label, sweep_axis=None, sweep_values=None
    )


def _format_value(value: float) -> str:
    return str(int(value)) if float(value) == int(value) else str(value)


def run_sweep(config: ExperimentConfig, out_dir: str | Path) -> list[RunRecord]:
    """One run_experiment per grid value; emits a per-value summary table.

    Without a sweep axis this degrades to a single passthrough run.
    """
    out_dir = Path(out_dir)
    if config.sweep_axis is None:
        return [run_experiment(config, out_dir)]
    records = []
    rows = []
    for value in config.sweep_values:
        sub = _apply_sweep_value(config, value)
        record = run_experiment(sub, out_dir / sub.name)
        records.append(record)
        note = ""
        if config.sweep_axis == "beta" and float(value) == 0.0:
            note = "w/o adversarial training"
        rows.append((config.sweep_axis, _format_value(value), record, note))
    lines = [_sweep_header()]
    for axis, value, record, note in rows:
        lines.append(_sweep_row(axis, value, record, note))
    summary = "\n".join(lines) + "\n"
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "sweep_summary.txt").write_text(summary)
    (out_dir / "sweep_results.json").write_text(
        json.dumps([r.to_dict() for r in records], indent=2, sort_keys=True) + "\n"
    )
    return records


_SWEEP_COLUMNS = ("axis", "value", "auc", "f_gap", "f_rank", "note")


def _fmt_agg(aggregates: dict, key: str) -> str:
    if key not in aggregates:
        return "n/a"
    return f"{aggregates[key]['mean']:.4f}±{aggregates[key]['std']:.4f}"


def _sweep_header() -> str:
    return " | ".join(c.ljust(w) for c, w in zip(_SWEEP_COLUMNS, (6, 8, 15, 15, 15, 26)))


def _sweep_row(axis: str, value: str, record: RunRecord, note: str) -> str:
    cells = (
        axis, value,
        _fmt_agg(record.aggregates, "auc"),
        _fmt_agg(record.aggregates, "f_gap"),
        _fmt_agg(record.aggregates, "f_rank"),
        note,
    )
    return " | ".join(c.ljust(w) for c, w in zip(cells, (6, 8, 15, 15, 15, 26)))


def emit_report(records: list[RunRecord], out_dir: str | Path) -> None:
    """Write results.json + summary.txt (deterministic) and timings.json.

    results.json round-trips to the in-memory RunRecord; wall-clock numbers
    live only in the sidecar so reruns produce byte-identical reports.
    """
    if not records:
        raise ValueError("no records to report")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = records[0].to_dict() if len(records) == 1 else [r.to_dict() for r in records]
    (out_dir / RESULTS_FILE).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n"
    )
    header = ["dataset", "mode", "seeds", "failed", "AUC", "F_Gap", "F_Rank"]
    widths = (20, 12, 6, 6, 15, 15, 15)
    lines = [" | ".join(h.ljust(w) for h, w in zip(header, widths))]
    for record in records:
        mode = record.config.get("train", {}).get("mode", "?")
        cells = (
            record.name[:20],
            mode,
            str(len(record.seed_results)),
            str(record.n_failed),
            _fmt_agg(record.aggregates, "auc"),
            _fmt_agg(record.aggregates, "f_gap"),
            _fmt_agg(record.aggregates, "f_rank"),
        )
        lines.append(" | ".join(c.ljust(w) for c, w in zip(cells, widths)))
    (out_dir / SUMMARY_FILE).write_text("\n".join(lines) + "\n")
    timings = {
        record.name: {str(seed): t for seed, t in record.wall_clock.items()}
        for record in records
    }
    (out_dir / TIMINGS_FILE).write_text(json.dumps(timings, indent=2, sort_keys=True) + "\n")


def load_report(out_dir: str | Path) -> RunRecord:
    """Rebuild a RunRecord (including timings) from an emitted report."""
    out_dir = Path(out_dir)
    doc = json.loads((out_dir / RESULTS_FILE).read_text())
    if isinstance(doc, list):
        raise ValueError("directory holds a multi-record report; load it manually")
    timings_doc = json.loads((out_dir / TIMINGS_FILE).read_text())
    wall = {int(k): v for k, v in timings_doc.get(doc["name"], {}).items()}
    return RunRecord.from_dict(doc, wall_clock=wall)
