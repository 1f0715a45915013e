"""Outlier-validity and group-fairness metrics.

AUC follows the pairwise convention (ties between an outlier and an inlier
score count one half) but is computed in O(N log N) through tie-averaged
ranks. f_gap is the spread of per-subgroup AUCs; f_rank is the largest KL
divergence between the subgroup mix of the top r% scored rows (r from 5 to
20) and the subgroup mix of the whole dataset. The two Score aggregators
normalize a per-algorithm, per-dataset results table by the best value
achieved on each dataset.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

Array = np.ndarray

logger = logging.getLogger(__name__)

RANK_PERCENTS = tuple(range(5, 21))
SCORE_EPSILON = 1e-5
KL_SMOOTHING = 1e-9


class UndefinedMetricError(ValueError):
    """Raised when a metric is undefined for the given inputs."""


def _tie_average_ranks(values: Array) -> Array:
    """1-based ranks with ties sharing their average rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def auc(scores: Array, labels: Array) -> float:
    """Probability that a random outlier outscores a random inlier, counting
    ties as one half. Raises if only one class is present."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be 1-D arrays of equal length")
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC needs both outlier and inlier labels")
    ranks = _tie_average_ranks(scores)
    rank_sum = ranks[pos].sum()
    return float((rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def auc_pairwise(scores: Array, labels: Array) -> float:
    """Quadratic-time AUC straight from the pairwise definition. Slow;
    kept as the independent oracle for the rank-based implementation."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos = scores[labels == 1]
    neg = scores[labels != 1]
    if len(pos) == 0 or len(neg) == 0:
        raise UndefinedMetricError("AUC needs both outlier and inlier labels")
    penalty = 0.0
    for sp in pos:
        penalty += float(np.sum(sp < neg)) + 0.5 * float(np.sum(sp == neg))
    return 1.0 - penalty / (len(pos) * len(neg))


def f_gap(scores: Array, labels: Array, subgroups: Array) -> tuple[float, dict[int, float]]:
    """Max minus min per-subgroup AUC.

    Subgroups lacking either class are excluded with a warning; fewer than
    two usable subgroups leaves the metric undefined.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    subgroups = np.asarray(subgroups)
    per_group: dict[int, float] = {}
    for g in np.unique(subgroups):
        mask = subgroups == g
        group_labels = labels[mask]
        if group_labels.min() == group_labels.max():
            logger.warning(
                "subgroup %s has a single class; excluded from f_gap", g
            )
            continue
        per_group[int(g)] = auc(scores[mask], group_labels)
    if len(per_group) < 2:
        raise UndefinedMetricError(
            "f_gap needs at least two subgroups containing both classes"
        )
    values = list(per_group.values())
    return float(max(values) - min(values)), per_group


def _kl(p: Array, q: Array) -> float:
    mask = p > 0.0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def f_rank(
    scores: Array,
    subgroups: Array,
    percents: tuple[int, ...] = RANK_PERCENTS,
    smoothing: float = KL_SMOOTHING,
) -> tuple[float, dict[int, float]]:
    """Largest subgroup-distribution drift among the top-ranked rows.

    For each r, takes the ceil(r*N/100) highest scores (ties broken by row
    order), forms the subgroup distribution with add-``smoothing`` mass per
    subgroup, and measures its KL divergence from the whole-dataset subgroup
    distribution. Returns the max and a per-r sweep.
    """
    scores = np.asarray(scores, dtype=np.float64)
    subgroups = np.asarray(subgroups)
    n = len(scores)
    if n < 20:
        raise UndefinedMetricError("f_rank needs at least 20 rows")
    groups = np.unique(subgroups)
    group_pos = {int(g): i for i, g in enumerate(groups)}
    reference = np.array([(subgroups == g).sum() for g in groups], dtype=np.float64)
    reference /= reference.sum()
    # stable sort by (score desc, index asc)
    order = np.argsort(-scores, kind="stable")
    sweep: dict[int, float] = {}
    for r in percents:
        top = order[: math.ceil(r * n / 100.0)]
        counts = np.zeros(len(groups))
        for g in subgroups[top]:
            counts[group_pos[int(g)]] += 1.0
        dist = (counts + smoothing) / (counts.sum() + smoothing * len(groups))
        sweep[r] = _kl(dist, reference)
    return float(max(sweep.values())), sweep


@dataclass
class MetricReport:
    """Per-run evaluation: validity plus both fairness measurements."""

    auc: float
    subgroup_auc: dict[int, float]
    f_gap: float
    f_rank: float
    rank_sweep: dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "auc": self.auc,
            "subgroup_auc": {str(k): v for k, v in self.subgroup_auc.items()},
            "f_gap": self.f_gap,
            "f_rank": self.f_rank,
            "rank_sweep": {str(k): v for k, v in self.rank_sweep.items()},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MetricReport":
        return cls(
            auc=doc["auc"],
            subgroup_auc={int(k): v for k, v in doc["subgroup_auc"].items()},
            f_gap=doc["f_gap"],
            f_rank=doc["f_rank"],
            rank_sweep={int(k): v for k, v in doc.get("rank_sweep", {}).items()},
        )


def evaluate(scores: Array, labels: Array, subgroups: Array) -> MetricReport:
    """Compute the full metric report for one score vector."""
    gap, per_group = f_gap(scores, labels, subgroups)
    drift, sweep = f_rank(scores, subgroups)
    return MetricReport(
        auc=auc(scores, labels),
        subgroup_auc=per_group,
        f_gap=gap,
        f_rank=drift,
        rank_sweep=sweep,
    )


def score_auc(table: dict[str, dict[str, float]]) -> dict[str, float]:
    """Cross-dataset aggregate for a validity metric (higher is better).

    ``table[algorithm][dataset]`` holds per-dataset AUCs; missing cells make
    the algorithm skip that dataset. Each cell is divided by the best value
    any algorithm achieved on that dataset, then averaged per algorithm.
    """
    best = _per_dataset_best(table, maximize=True)
    out: dict[str, float] = {}
    for alg, cells in table.items():
        if not cells:
            raise UndefinedMetricError(f"algorithm {alg!r} has no results")
        out[alg] = float(np.mean([v / best[d] for d, v in cells.items()]))
    return out


def score_f(table: dict[str, dict[str, float]], epsilon: float = SCORE_EPSILON) -> dict[str, float]:
    """Cross-dataset aggregate for a fairness metric (lower is better):
    mean over datasets of (best + eps) / (value + eps)."""
    best = _per_dataset_best(table, maximize=False)
    out: dict[str, float] = {}
    for alg, cells in table.items():
        if not cells:
            raise UndefinedMetricError(f"algorithm {alg!r} has no results")
        out[alg] = float(
            np.mean([(best[d] + epsilon) / (v + epsilon) for d, v in cells.items()])
        )
    return out


def _per_dataset_best(table: dict[str, dict[str, float]], maximize: bool) -> dict[str, float]:
    if not table:
        raise UndefinedMetricError("empty results table")
    best: dict[str, float] = {}
    for cells in table.values():
        for dataset, value in cells.items():
            if dataset not in best:
                best[dataset] = value
            else:
                best[dataset] = max(best[dataset], value) if maximize else min(best[dataset], value)
    if not best:
        raise UndefinedMetricError("results table has no cells")
    return best
