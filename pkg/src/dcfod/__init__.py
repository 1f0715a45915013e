"""Deep-clustering outlier detection with adversarial subgroup debiasing.

Public surface: dataset loading and generation (``data``), the trainable
model and its losses (``model``), centroid initialization (``cluster``),
validity/fairness metrics (``metrics``), and the experiment harness
(``harness``). The ``dcfod`` console script wraps the harness.
"""

from .cluster import KmeansResult, kmeans, minibatch_kmeans
from .data import (
    BatchPlan,
    Dataset,
    DatasetSchema,
    LoadError,
    SyntheticConfig,
    iterate_batches,
    load_csv,
    make_synthetic,
    synthetic_schema,
    write_synthetic_csv,
)
from .metrics import (
    MetricReport,
    UndefinedMetricError,
    auc,
    auc_pairwise,
    evaluate,
    f_gap,
    f_rank,
    score_auc,
    score_f,
)
from .model import (
    BatchState,
    DcfodModel,
    FitResult,
    TrainConfig,
    TrainingDiverged,
    auxiliary_targets,
    cluster_memberships,
    dynamic_weights,
    fit,
    load_checkpoint,
    outlier_scores,
    save_checkpoint,
    soft_assignments,
    train_step,
)
from .nn import Adam, GradCheckReport, Mlp, check_gradients, matmul, sgd_step

__version__ = "0.1.0"

__all__ = [
    "Adam",
    "BatchPlan",
    "BatchState",
    "Dataset",
    "DatasetSchema",
    "DcfodModel",
    "FitResult",
    "GradCheckReport",
    "KmeansResult",
    "LoadError",
    "MetricReport",
    "Mlp",
    "SyntheticConfig",
    "TrainConfig",
    "TrainingDiverged",
    "UndefinedMetricError",
    "auc",
    "auc_pairwise",
    "auxiliary_targets",
    "check_gradients",
    "cluster_memberships",
    "dynamic_weights",
    "evaluate",
    "f_gap",
    "f_rank",
    "fit",
    "iterate_batches",
    "kmeans",
    "load_checkpoint",
    "load_csv",
    "make_synthetic",
    "matmul",
    "minibatch_kmeans",
    "outlier_scores",
    "save_checkpoint",
    "score_auc",
    "score_f",
    "sgd_step",
    "soft_assignments",
    "synthetic_schema",
    "train_step",
    "write_synthetic_csv",
]
