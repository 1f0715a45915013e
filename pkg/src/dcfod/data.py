"""Dataset ingestion and generation.

CSV files (RFC-4180 style, header row, UTF-8) are described by a small
declarative schema: which columns are features (numeric or categorical),
which column carries the sensitive attribute, and optionally which column
carries ground-truth labels together with a predicate picking out the
outlier value. Loading one-hot encodes categoricals, z-scores numerics over
the full dataset (the detector is transductive, so there is no train/test
statistics split), and keeps labels strictly separate from the feature
matrix: nothing in the training path ever receives them.

Also provides a seeded synthetic generator (Gaussian clusters plus
uniform-box outliers with a controllable subgroup skew) used by the test
suite and the ``synth`` CLI command, and deterministic minibatch iteration.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

Array = np.ndarray

COLUMN_KINDS = ("numeric", "categorical")
_PREDICATE_OPS = ("<=", ">=", "==", "!=", "<", ">")


class LoadError(ValueError):
    """Raised when a CSV file or schema cannot be turned into a Dataset."""


@dataclass
class DatasetSchema:
    """Declarative description of a CSV dataset.

    feature_columns maps column name -> "numeric" | "categorical" in the
    order the features should appear. The sensitive column is always treated
    as categorical and is excluded from the feature matrix unless
    include_sensitive_in_features is set.
    """

    feature_columns: dict[str, str]
    sensitive_column: str
    label_column: str | None = None
    label_predicate: str | None = None
    include_sensitive_in_features: bool = False

    def __post_init__(self):
        if not self.feature_columns:
            raise LoadError("schema declares no feature columns")
        for name, kind in self.feature_columns.items():
            if kind not in COLUMN_KINDS:
                raise LoadError(f"column {name!r} has unknown kind {kind!r}")
        if self.label_column is not None and self.label_predicate is None:
            raise LoadError("label_column requires label_predicate")

    def to_dict(self) -> dict:
        return {
            "feature_columns": dict(self.feature_columns),
            "sensitive_column": self.sensitive_column,
            "label_column": self.label_column,
            "label_predicate": self.label_predicate,
            "include_sensitive_in_features": self.include_sensitive_in_features,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "DatasetSchema":
        try:
            return cls(
                feature_columns=dict(doc["feature_columns"]),
                sensitive_column=doc["sensitive_column"],
                label_column=doc.get("label_column"),
                label_predicate=doc.get("label_predicate"),
                include_sensitive_in_features=bool(
                    doc.get("include_sensitive_in_features", False)
                ),
            )
        except KeyError as exc:
            raise LoadError(f"schema is missing required key {exc}") from exc

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "DatasetSchema":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise LoadError(f"cannot read schema {path}: {exc}") from exc
        return cls.from_dict(doc)


def parse_label_predicate(text: str):
    """Parse predicates like "<= 6", "> 50", "== yes" into cell -> bool.

    Ordering operators compare numerically; equality first compares the raw
    string and falls back to numeric comparison so "== 1" matches "1.0".
    """
    text = text.strip()
    for op in _PREDICATE_OPS:
        if text.startswith(op):
            literal = text[len(op):].strip()
            if not literal:
                raise LoadError(f"label predicate {text!r} has no right-hand side")
            break
    else:
        raise LoadError(
            f"label predicate {text!r} must start with one of {_PREDICATE_OPS}"
        )

    def as_number(cell: str) -> float:
        try:
            return float(cell)
        except ValueError:
            raise LoadError(
                f"label predicate {text!r} needs numeric cells, got {cell!r}"
            ) from None

    if op in ("==", "!="):
        def predicate(cell: str) -> bool:
            cell = cell.strip()
            same = cell == literal
            if not same:
                try:
                    same = float(cell) == float(literal)
                except ValueError:
                    same = False
            return same if op == "==" else not same
    else:
        threshold = float(literal)
        def predicate(cell: str) -> bool:
            value = as_number(cell.strip())
            if op == "<=":
                return value <= threshold
            if op == ">=":
                return value >= threshold
            if op == "<":
                return value < threshold
            return value > threshold

    return predicate


@dataclass
class Dataset:
    """Encoded dataset: features, subgroup indices, and optional labels.

    labels, when present, are for evaluation only. Training code receives
    the feature matrix and subgroup indices but never this field.
    """

    x: Array                       # (N, n) float64, numerics z-scored
    subgroups: Array               # (N,) int in [0, n_subgroups)
    labels: Array | None           # (N,) int {0,1}, 1 = outlier, or None
    subgroup_names: list[str]
    feature_names: list[str]
    n_dropped_rows: int = 0

    @property
    def n_samples(self) -> int:
        return self.x.shape[0]

    @property
    def n_features(self) -> int:
        return self.x.shape[1]

    @property
    def n_subgroups(self) -> int:
        return len(self.subgroup_names)


def _standardize(column: Array) -> Array:
    mean = column.mean()
    std = column.std()
    if std < 1e-12:
        return np.zeros_like(column)
    return (column - mean) / std


def load_csv(path: str | Path, schema: DatasetSchema) -> Dataset:
    """Load and encode a CSV file according to ``schema``.

    Rows containing empty cells in any declared column are dropped (the count
    is recorded on the Dataset); a non-empty cell that fails to parse as a
    number in a numeric column is an error.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise LoadError(f"{path}: file is empty") from None
            rows = list(reader)
    except OSError as exc:
        raise LoadError(f"cannot read {path}: {exc}") from exc

    header = [h.strip() for h in header]
    col_index = {name: i for i, name in enumerate(header)}
    needed = list(schema.feature_columns) + [schema.sensitive_column]
    if schema.label_column:
        needed.append(schema.label_column)
    missing = [c for c in needed if c not in col_index]
    if missing:
        raise LoadError(f"{path}: missing columns {missing} (header: {header})")

    used_idx = [col_index[c] for c in needed]
    kept: list[list[str]] = []
    n_dropped = 0
    for lineno, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise LoadError(
                f"{path}:{lineno}: row has {len(row)} cells, header has {len(header)}"
            )
        cells = [row[i].strip() for i in used_idx]
        if any(c == "" for c in cells):
            n_dropped += 1
            continue
        kept.append(cells)
    if not kept:
        raise LoadError(f"{path}: no usable rows (dropped {n_dropped})")

    n_rows = len(kept)
    columns = list(zip(*kept))
    feature_blocks: list[Array] = []
    feature_names: list[str] = []

    def encode_categorical(name: str, raw: tuple[str, ...]) -> None:
        levels = sorted(set(raw))
        index = {lv: j for j, lv in enumerate(levels)}
        block = np.zeros((n_rows, len(levels)))
        block[np.arange(n_rows), [index[v] for v in raw]] = 1.0
        feature_blocks.append(block)
        feature_names.extend(f"{name}={lv}" for lv in levels)

    for pos, (name, kind) in enumerate(schema.feature_columns.items()):
        raw = columns[pos]
        if kind == "numeric":
            try:
                values = np.array([float(v) for v in raw])
            except ValueError:
                bad = next(v for v in raw if not _is_float(v))
                raise LoadError(
                    f"{path}: column {name!r} is numeric but has cell {bad!r}"
                ) from None
            feature_blocks.append(_standardize(values)[:, None])
            feature_names.append(name)
        else:
            encode_categorical(name, raw)

    sensitive_raw = columns[len(schema.feature_columns)]
    subgroup_names = sorted(set(sensitive_raw))
    sub_index = {lv: j for j, lv in enumerate(subgroup_names)}
    subgroups = np.array([sub_index[v] for v in sensitive_raw], dtype=np.int64)
    if schema.include_sensitive_in_features:
        encode_categorical(schema.sensitive_column, sensitive_raw)

    labels = None
    if schema.label_column:
        predicate = parse_label_predicate(schema.label_predicate)
        label_raw = columns[len(schema.feature_columns) + 1]
        labels = np.array([1 if predicate(v) else 0 for v in label_raw], dtype=np.int64)

    return Dataset(
        x=np.hstack(feature_blocks),
        subgroups=subgroups,
        labels=labels,
        subgroup_names=subgroup_names,
        feature_names=feature_names,
        n_dropped_rows=n_dropped,
    )


def _is_float(v: str) -> bool:
    try:
        float(v)
        return True
    except ValueError:
        return False


@dataclass
class SyntheticConfig:
    """Knobs for the synthetic benchmark generator.

    Inliers are Gaussian clusters; outliers are uniform draws over the
    (slightly expanded) bounding box of the inliers. subgroup_bias skews the
    subgroup distribution of outlier rows toward the last subgroup while
    inlier rows compensate, so the marginal subgroup distribution keeps its
    base share and bias=0 means subgroup and outlierness are independent.
    subgroup_shift offsets each subgroup's rows along a fixed random
    direction, making the sensitive attribute recoverable from the features
    themselves (as it typically is in real data). subgroup_noise widens the
    inlier clusters of higher-index subgroups (last subgroup's standard
    deviation is scaled by 1 + subgroup_noise), building in a detection
    disparity between subgroups. subgroup_fraction sets the marginal share
    of the last subgroup (remaining mass split evenly over the others);
    None keeps subgroups balanced.
    """

    n_samples: int = 1000
    n_features: int = 10
    n_clusters: int = 4
    outlier_rate: float = 0.1
    subgroup_bias: float = 0.0
    n_subgroups: int = 2
    subgroup_shift: float = 0.0
    subgroup_noise: float = 0.0
    subgroup_fraction: float | None = None
    center_spread: float = 4.0
    cluster_std: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.outlier_rate < 0.5:
            raise ValueError("outlier_rate must lie in (0, 0.5)")
        if self.n_subgroups < 2:
            raise ValueError("need at least 2 subgroups")
        if self.subgroup_bias < 0.0:
            raise ValueError("subgroup_bias must be non-negative")
        if self.subgroup_noise < 0.0:
            raise ValueError("subgroup_noise must be non-negative")
        base = self.base_fraction()
        if not 0.0 < base < 1.0:
            raise ValueError("subgroup_fraction must lie in (0, 1)")
        if base + self.subgroup_bias > 1.0:
            raise ValueError("subgroup_bias too large for this subgroup_fraction")
        rate = self.outlier_rate
        if base - self.subgroup_bias * rate / (1.0 - rate) < 0.0:
            raise ValueError("subgroup_bias too large for this outlier_rate")

    def base_fraction(self) -> float:
        """Marginal share of the last subgroup."""
        if self.subgroup_fraction is None:
            return 1.0 / self.n_subgroups
        return self.subgroup_fraction


def _synthetic_raw(cfg: SyntheticConfig):
    """Raw (unstandardized) synthetic table: features, subgroups, labels."""
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    n = cfg.n_samples
    n_out = int(round(cfg.outlier_rate * n))
    n_in = n - n_out

    m = cfg.n_subgroups
    rate = cfg.outlier_rate
    base = cfg.base_fraction()
    p_last_out = base + cfg.subgroup_bias
    p_last_in = base - cfg.subgroup_bias * rate / (1.0 - rate)

    def draw(p_last: float, count: int) -> Array:
        probs = np.full(m, (1.0 - p_last) / (m - 1))
        probs[-1] = p_last
        return rng.choice(m, size=count, p=probs)

    subgroups = np.concatenate([draw(p_last_in, n_in), draw(p_last_out, n_out)])

    centers = rng.normal(0.0, cfg.center_spread, size=(cfg.n_clusters, cfg.n_features))
    which = rng.integers(cfg.n_clusters, size=n_in)
    noise_scale = cfg.cluster_std * (1.0 + cfg.subgroup_noise * subgroups[:n_in] / (m - 1))
    x_in = centers[which] + noise_scale[:, None] * rng.normal(
        0.0, 1.0, size=(n_in, cfg.n_features)
    )
    lo = x_in.min(axis=0)
    hi = x_in.max(axis=0)
    margin = 0.1 * (hi - lo)
    x_out = rng.uniform(lo - margin, hi + margin, size=(n_out, cfg.n_features))

    x = np.vstack([x_in, x_out])
    labels = np.concatenate([np.zeros(n_in, dtype=np.int64), np.ones(n_out, dtype=np.int64)])

    if cfg.subgroup_shift != 0.0:
        direction = rng.normal(size=cfg.n_features)
        direction /= np.linalg.norm(direction)
        offsets = cfg.subgroup_shift * (subgroups / (m - 1) - 0.5)
        x = x + offsets[:, None] * direction[None, :]

    order = rng.permutation(n)
    return x[order], subgroups[order], labels[order]


def make_synthetic(cfg: SyntheticConfig) -> Dataset:
    """Generate an encoded synthetic Dataset (features z-scored)."""
    x, subgroups, labels = _synthetic_raw(cfg)
    for j in range(x.shape[1]):
        x[:, j] = _standardize(x[:, j])
    return Dataset(
        x=x,
        subgroups=subgroups.astype(np.int64),
        labels=labels,
        subgroup_names=[str(i) for i in range(cfg.n_subgroups)],
        feature_names=[f"f{j}" for j in range(cfg.n_features)],
    )


def synthetic_schema(cfg: SyntheticConfig) -> DatasetSchema:
    return DatasetSchema(
        feature_columns={f"f{j}": "numeric" for j in range(cfg.n_features)},
        sensitive_column="group",
        label_column="outlier",
        label_predicate="== 1",
    )


def write_synthetic_csv(cfg: SyntheticConfig, data_path: str | Path,
                        schema_path: str | Path) -> None:
    """Write the raw synthetic table as CSV plus its schema file.

    Floats are written with repr so that loading the CSV reproduces
    make_synthetic(cfg) bit for bit.
    """
    x, subgroups, labels = _synthetic_raw(cfg)
    with Path(data_path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{j}" for j in range(cfg.n_features)] + ["group", "outlier"])
        for i in range(x.shape[0]):
            writer.writerow(
                [repr(float(v)) for v in x[i]] + [int(subgroups[i]), int(labels[i])]
            )
    synthetic_schema(cfg).save(schema_path)


@dataclass
class BatchPlan:
    """Minibatch schedule: size, shuffle seed, and epoch count."""

    batch_size: int
    seed: int
    epochs: int

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def iterate_batches(n_samples: int, plan: BatchPlan, epoch: int) -> list[Array]:
    """Index batches for one epoch: a (seed, epoch)-determined permutation of
    range(n_samples) cut into contiguous slices; the final partial batch is
    kept."""
    rng = np.random.default_rng(np.random.SeedSequence((plan.seed, epoch)))
    perm = rng.permutation(n_samples)
    return [perm[i : i + plan.batch_size] for i in range(0, n_samples, plan.batch_size)]
