"""Joint deep-clustering outlier detection with adversarial subgroup debiasing.

An encoder maps rows into a low-dimensional space carrying a set of trainable
cluster centroids. Soft cluster assignments use a Student-t kernel (one
degree of freedom) on embedded distances; a sharpened auxiliary target
(squared assignments renormalized by cluster frequency, treated as constant)
pulls the assignment distribution toward confident clusters via KL
divergence. Each row's outlier score is its distance to the nearest centroid
divided by the largest such distance inside the same cluster, and a softmax
over negated scores turns that into per-row weights that sum to one: likely
inliers dominate every loss term, likely outliers are damped.

Three losses drive training. A weighted reconstruction loss through a
decoder keeps the embedding informative; the weighted KL term tightens the
cluster structure; and a subgroup discriminator plays a minimax game against
the encoder: the discriminator descends its weighted cross-entropy while the
encoder/decoder/centroids descend

    alpha * reconstruction + clustering_kl - beta * discriminator_ce

so the embedding is pushed to hide the sensitive attribute. Per step, both
gradients are evaluated at the step-start parameters, the discriminator
updates first, then the extractor. Scores, weights, and auxiliary targets
are computed before gradients and held constant inside the step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .cluster import _squared_distances, kmeans, minibatch_kmeans
from .data import BatchPlan, iterate_batches
from .nn import Adam, Array, Mlp, as_matrix, sgd_step

MODES = ("full", "no_adversary", "no_weights")
OPTIMIZERS = ("sgd", "adam")
SCORE_EPSILON = 1e-12
CHECKPOINT_VERSION = 1


class TrainingDiverged(RuntimeError):
    """Raised when a loss stops being finite during training."""


@dataclass
class TrainConfig:
    """Hyperparameters and mode switches for ``fit``.

    Defaults: K=10 clusters in a 64-dimensional
    embedding, encoder drop(0.1)-n-500-500-2000-64, mirrored decoder,
    discriminator 64-500-500-2000-M, alpha=8, beta=100, learning rate 1e-5
    (1e-4 for the centroid block) decayed by 0.1 every 30 epochs, and
    90 epochs with batches of 64 (40 epochs / 256 for datasets above the
    large threshold). ``mode`` selects the ablations: "no_adversary" drops
    the discriminator entirely (the DCOD variant; "dcod" is accepted as an
    alias), "no_weights" replaces the dynamic weights by uniform 1/B.
    """

    n_clusters: int = 10
    embed_dim: int = 64
    alpha: float = 8.0
    beta: float = 100.0
    encoder_hidden: tuple[int, ...] = (500, 500, 2000)
    decoder_hidden: tuple[int, ...] = (2000, 500, 500)
    discriminator_hidden: tuple[int, ...] = (500, 500, 2000)
    input_dropout: float = 0.1
    epochs: int | None = None
    batch_size: int | None = None
    learning_rate: float = 1e-5
    centroid_learning_rate: float = 1e-4
    lr_decay: float = 0.1
    lr_decay_every: int = 30
    optimizer: str = "sgd"
    mode: str = "full"
    seed: int = 0
    large_dataset_threshold: int = 10000
    large_epochs: int = 40
    large_batch_size: int = 256
    small_epochs: int = 90
    small_batch_size: int = 64
    kmeans_max_iters: int = 100
    minibatch_kmeans_batch: int = 1024
    minibatch_kmeans_iters: int = 100

    def __post_init__(self):
        if self.mode == "dcod":
            self.mode = "no_adversary"
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {OPTIMIZERS}")
        if self.alpha < 0.0 or self.beta < 0.0:
            raise ValueError("alpha and beta must be non-negative")
        if self.n_clusters < 2:
            raise ValueError("need at least 2 clusters")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if not 0.0 <= self.input_dropout < 1.0:
            raise ValueError("input_dropout must lie in [0, 1)")
        self.encoder_hidden = tuple(int(w) for w in self.encoder_hidden)
        self.decoder_hidden = tuple(int(w) for w in self.decoder_hidden)
        self.discriminator_hidden = tuple(int(w) for w in self.discriminator_hidden)

    @property
    def adversarial(self) -> bool:
        return self.mode != "no_adversary"

    def resolved_epochs(self, n_samples: int) -> int:
        if self.epochs is not None:
            return self.epochs
        return self.large_epochs if n_samples > self.large_dataset_threshold else self.small_epochs

    def resolved_batch_size(self, n_samples: int) -> int:
        if self.batch_size is not None:
            return self.batch_size
        return (
            self.large_batch_size
            if n_samples > self.large_dataset_threshold
            else self.small_batch_size
        )

    def learning_rates_at(self, epoch: int) -> tuple[float, float]:
        """(network lr, centroid lr) after the staircase decay."""
        factor = self.lr_decay ** (epoch // self.lr_decay_every)
        return self.learning_rate * factor, self.centroid_learning_rate * factor

    def to_dict(self) -> dict:
        doc = asdict(self)
        for key in ("encoder_hidden", "decoder_hidden", "discriminator_hidden"):
            doc[key] = list(doc[key])
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "TrainConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown TrainConfig keys: {sorted(unknown)}")
        return cls(**doc)


# ---------------------------------------------------------------------------
# batch-level quantities


def _assignment_kernel(z: Array, centroids: Array):
    """Student-t kernel internals: (soft assignments, kernel values, row sums)."""
    d2 = _squared_distances(z, centroids)
    t = 1.0 / (1.0 + d2)
    row_sum = t.sum(axis=1, keepdims=True)
    return t / row_sum, t, row_sum


def soft_assignments(z: Array, centroids: Array) -> Array:
    """Row-normalized (1 + ||z - mu_k||^2)^-1 kernel, one row per sample."""
    p, _, _ = _assignment_kernel(z, centroids)
    return p


def auxiliary_targets(p: Array) -> Array:
    """Sharpened targets: square assignments, divide by per-cluster mass over
    this scope, renormalize rows. Treated as constant by all gradients."""
    weight = p * p / p.sum(axis=0, keepdims=True)
    return weight / weight.sum(axis=1, keepdims=True)


def cluster_memberships(z: Array, centroids: Array) -> Array:
    """Nearest-centroid index per row (equals the argmax soft assignment)."""
    return np.argmin(_squared_distances(z, centroids), axis=1)


def outlier_scores(
    z: Array,
    centroids: Array,
    memberships: Array | None = None,
    eps: float = SCORE_EPSILON,
) -> Array:
    """Distance to the nearest centroid, normalized by the farthest member
    of the same cluster within the given scope (a batch during training, the
    whole dataset at final scoring). Zero-spread clusters score zero."""
    d2 = _squared_distances(z, centroids)
    if memberships is None:
        memberships = np.argmin(d2, axis=1)
    dist = np.sqrt(d2[np.arange(z.shape[0]), memberships])
    scores = np.zeros(z.shape[0])
    for c in np.unique(memberships):
        members = memberships == c
        denom = dist[members].max()
        if denom > eps:
            scores[members] = dist[members] / denom
    return scores


def dynamic_weights(scores: Array) -> Array:
    """Softmax over negated outlier scores; sums to one over the scope."""
    w = np.exp(-np.asarray(scores, dtype=np.float64))
    return w / w.sum()


@dataclass
class BatchState:
    """Everything computed for one minibatch before the gradient step."""

    soft: Array            # (B, K) soft assignments
    targets: Array         # (B, K) auxiliary targets
    memberships: Array     # (B,) nearest-centroid indices
    scores: Array          # (B,) outlier scores in [0, 1]
    weights: Array         # (B,) per-row weights summing to 1


# ---------------------------------------------------------------------------
# losses and their gradients (weights and targets are constants throughout)


def reconstruction_loss(x: Array, x_hat: Array, weights: Array) -> float:
    return float(np.sum(weights * np.sum((x - x_hat) ** 2, axis=1)))


def reconstruction_grad(x: Array, x_hat: Array, weights: Array) -> Array:
    return 2.0 * weights[:, None] * (x_hat - x)


def _log_softmax(logits: Array) -> Array:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def subgroup_cross_entropy(logits: Array, subgroups: Array, weights: Array) -> float:
    log_probs = _log_softmax(logits)
    return float(-np.sum(weights * log_probs[np.arange(len(subgroups)), subgroups]))


def subgroup_cross_entropy_grad(logits: Array, subgroups: Array, weights: Array) -> Array:
    probs = np.exp(_log_softmax(logits))
    probs[np.arange(len(subgroups)), subgroups] -= 1.0
    return weights[:, None] * probs


def clustering_kl_loss(p: Array, q: Array, weights: Array) -> float:
    return float(np.sum(weights[:, None] * p * np.log(p / q)))


def clustering_kl_grads(
    z: Array, centroids: Array, q: Array, weights: Array
) -> tuple[Array, Array]:
    """Gradients of the weighted KL(P||Q) term w.r.t. embeddings and
    centroids; q and weights are constants, p is a function of (z, mu)."""
    p, t, row_sum = _assignment_kernel(z, centroids)
    dl_dp = weights[:, None] * (np.log(p / q) + 1.0)
    dl_dt = (dl_dp - np.sum(dl_dp * p, axis=1, keepdims=True)) / row_sum
    dl_dd2 = -dl_dt * t * t
    diff = z[:, None, :] - centroids[None, :, :]
    dz = 2.0 * np.einsum("bk,bkd->bd", dl_dd2, diff)
    dmu = -2.0 * np.einsum("bk,bkd->kd", dl_dd2, diff)
    return dz, dmu


# ---------------------------------------------------------------------------
# model


@dataclass
class DcfodModel:
    """Trained (or in-training) parameter bundle."""

    encoder: Mlp
    decoder: Mlp
    discriminator: Mlp | None
    centroids: Array  # (K, D)

    def embed(self, x: Array, training: bool = False) -> Array:
        return self.encoder.forward(x, training=training)

    def score(self, x: Array) -> Array:
        """Final per-row outlier scores: full-data pass with dropout off and
        whole-dataset normalization inside each cluster."""
        z = self.embed(as_matrix(x), training=False)
        scores = outlier_scores(z, self.centroids)
        if not np.all(np.isfinite(scores)):
            raise TrainingDiverged("non-finite outlier scores at evaluation")
        return scores

    def parameter_blocks(self) -> dict[str, list[Array]]:
        blocks = {
            "encoder": self.encoder.parameters(),
            "decoder": self.decoder.parameters(),
            "centroids": [self.centroids],
        }
        if self.discriminator is not None:
            blocks["discriminator"] = self.discriminator.parameters()
        return blocks


def build_model(n_features: int, n_subgroups: int | None, config: TrainConfig) -> DcfodModel:
    """Fresh model with independent per-component RNG streams so that the
    presence or absence of the discriminator never shifts the streams used
    by the other components."""
    root = np.random.SeedSequence(config.seed)
    enc_seed, dec_seed, disc_seed, _, _ = root.spawn(5)
    encoder = Mlp(
        (n_features, *config.encoder_hidden, config.embed_dim),
        np.random.default_rng(enc_seed),
        input_dropout=config.input_dropout,
    )
    decoder = Mlp(
        (config.embed_dim, *config.decoder_hidden, n_features),
        np.random.default_rng(dec_seed),
    )
    discriminator = None
    if config.adversarial:
        if n_subgroups is None or n_subgroups < 1:
            raise ValueError("adversarial training needs subgroup labels")
        discriminator = Mlp(
            (config.embed_dim, *config.discriminator_hidden, n_subgroups),
            np.random.default_rng(disc_seed),
        )
    return DcfodModel(
        encoder=encoder,
        decoder=decoder,
        discriminator=discriminator,
        centroids=np.zeros((config.n_clusters, config.embed_dim)),
    )


def _training_seeds(config: TrainConfig) -> tuple[int, int]:
    """(kmeans seed, batch shuffle seed) from the two reserved streams."""
    root = np.random.SeedSequence(config.seed)
    _, _, _, kmeans_ss, batch_ss = root.spawn(5)
    return int(kmeans_ss.generate_state(1)[0]), int(batch_ss.generate_state(1)[0])


@dataclass
class StepLosses:
    reconstruction: float
    clustering: float
    adversarial: float | None

    def all_finite(self) -> bool:
        values = [self.reconstruction, self.clustering]
        if self.adversarial is not None:
            values.append(self.adversarial)
        return bool(np.all(np.isfinite(values)))


def compute_batch_state(model: DcfodModel, z: Array, config: TrainConfig) -> BatchState:
    """Assignments, targets, scores, and weights for one batch embedding."""
    p, _, _ = _assignment_kernel(z, model.centroids)
    q = auxiliary_targets(p)
    memberships = np.argmin(_squared_distances(z, model.centroids), axis=1)
    scores = outlier_scores(z, model.centroids, memberships)
    if config.mode == "no_weights":
        weights = np.full(len(scores), 1.0 / len(scores))
    else:
        weights = dynamic_weights(scores)
    return BatchState(
        soft=p, targets=q, memberships=memberships, scores=scores, weights=weights
    )


def train_step(
    model: DcfodModel,
    x: Array,
    subgroups: Array | None,
    config: TrainConfig,
    lr: float | None = None,
    centroid_lr: float | None = None,
    optimizers: dict[str, Adam] | None = None,
) -> tuple[BatchState, StepLosses]:
    """One minimax step on a minibatch.

    Order inside the step: embed; compute assignments, targets, scores, and
    weights (all constants from here on); evaluate every gradient at the
    step-start parameters; update the discriminator on its cross-entropy;
    update encoder, decoder, and centroids on
    alpha * reconstruction + clustering_kl - beta * discriminator_ce.
    """
    lr = config.learning_rate if lr is None else lr
    centroid_lr = config.centroid_learning_rate if centroid_lr is None else centroid_lr
    adversarial = config.adversarial
    if adversarial and model.discriminator is None:
        raise ValueError("config asks for adversarial training but model has no discriminator")
    if adversarial and subgroups is None:
        raise ValueError("adversarial training needs subgroup labels for the batch")

    z = model.encoder.forward(x, training=True)
    if not np.all(np.isfinite(z)):
        raise TrainingDiverged(
            "non-finite embeddings; try a smaller learning_rate or beta"
        )
    with np.errstate(over="ignore", invalid="ignore"):
        x_hat = model.decoder.forward(z)
        state = compute_batch_state(model, z, config)
        w = state.weights
        recon = reconstruction_loss(x, x_hat, w)
        kl = clustering_kl_loss(state.soft, state.targets, w)
        adv = logits = None
        if adversarial:
            logits = model.discriminator.forward(z)
            adv = subgroup_cross_entropy(logits, subgroups, w)
    losses = StepLosses(reconstruction=recon, clustering=kl, adversarial=adv)
    if not losses.all_finite():
        raise TrainingDiverged(
            f"non-finite loss ({losses}); try a smaller learning_rate or beta"
        )

    dz_recon, dec_grads = model.decoder.backward(
        config.alpha * reconstruction_grad(x, x_hat, w)
    )
    dz_kl, dmu = clustering_kl_grads(z, model.centroids, state.targets, w)
    dz_total = dz_recon + dz_kl

    disc_grads = None
    if adversarial:
        dz_adv, disc_grads = model.discriminator.backward(
            subgroup_cross_entropy_grad(logits, subgroups, w)
        )
        dz_total = dz_total - config.beta * dz_adv

    _, enc_grads = model.encoder.backward(dz_total)

    if optimizers is None:
        if disc_grads is not None:
            sgd_step(model.discriminator.parameters(), disc_grads, lr)
        sgd_step(model.encoder.parameters(), enc_grads, lr)
        sgd_step(model.decoder.parameters(), dec_grads, lr)
        sgd_step([model.centroids], [dmu], centroid_lr)
    else:
        if disc_grads is not None:
            optimizers["discriminator"].step(disc_grads, lr)
        optimizers["encoder"].step(enc_grads, lr)
        optimizers["decoder"].step(dec_grads, lr)
        optimizers["centroids"].step([dmu], centroid_lr)
    return state, losses


@dataclass
class EpochStats:
    epoch: int
    learning_rate: float
    reconstruction: float
    clustering: float
    adversarial: float | None


@dataclass
class FitResult:
    model: DcfodModel
    scores: Array            # (N,) final full-data outlier scores
    history: list[EpochStats]


def fit(
    x: Array,
    subgroups: Array | None,
    config: TrainConfig,
    batch_callback=None,
) -> FitResult:
    """Train a model on a feature matrix and return final outlier scores.

    ``subgroups`` may be None only in "no_adversary" mode. Ground-truth
    outlier labels are deliberately not a parameter: evaluation is the
    metrics module's job. ``batch_callback``, when given, receives every
    BatchState (used by invariant checks and the weight-trajectory demos).
    """
    x = as_matrix(x)
    n, n_features = x.shape
    n_subgroups = None
    if subgroups is not None:
        subgroups = np.asarray(subgroups, dtype=np.int64)
        if subgroups.shape != (n,):
            raise ValueError("subgroups must be one index per row")
        if subgroups.min() < 0:
            raise ValueError("subgroup indices must be non-negative")
        n_subgroups = int(subgroups.max()) + 1
    elif config.adversarial:
        raise ValueError("adversarial training needs subgroup labels (or mode='no_adversary')")

    model = build_model(n_features, n_subgroups, config)
    kmeans_seed, batch_seed = _training_seeds(config)

    z0 = model.embed(x, training=False)
    if n > config.large_dataset_threshold:
        result = minibatch_kmeans(
            z0,
            config.n_clusters,
            kmeans_seed,
            batch_size=config.minibatch_kmeans_batch,
            iters=config.minibatch_kmeans_iters,
        )
    else:
        result = kmeans(z0, config.n_clusters, kmeans_seed, max_iters=config.kmeans_max_iters)
    model.centroids[...] = result.centroids

    optimizers = None
    if config.optimizer == "adam":
        optimizers = {
            "encoder": Adam(model.encoder.parameters()),
            "decoder": Adam(model.decoder.parameters()),
            "centroids": Adam([model.centroids]),
        }
        if model.discriminator is not None:
            optimizers["discriminator"] = Adam(model.discriminator.parameters())

    epochs = config.resolved_epochs(n)
    plan = BatchPlan(
        batch_size=config.resolved_batch_size(n), seed=batch_seed, epochs=epochs
    )
    history: list[EpochStats] = []
    for epoch in range(epochs):
        lr, centroid_lr = config.learning_rates_at(epoch)
        sums = np.zeros(3)
        n_batches = 0
        for idx in iterate_batches(n, plan, epoch):
            batch_subgroups = subgroups[idx] if subgroups is not None else None
            state, losses = train_step(
                model,
                x[idx],
                batch_subgroups,
                config,
                lr=lr,
                centroid_lr=centroid_lr,
                optimizers=optimizers,
            )
            sums += (
                losses.reconstruction,
                losses.clustering,
                losses.adversarial if losses.adversarial is not None else 0.0,
            )
            n_batches += 1
            if batch_callback is not None:
                batch_callback(state)
        history.append(
            EpochStats(
                epoch=epoch,
                learning_rate=lr,
                reconstruction=sums[0] / n_batches,
                clustering=sums[1] / n_batches,
                adversarial=(sums[2] / n_batches) if config.adversarial else None,
            )
        )
    return FitResult(model=model, scores=model.score(x), history=history)


# ---------------------------------------------------------------------------
# gradient validation


def gradient_check_suite(seed: int = 0, tolerance: float = 1e-4, step: float = 1e-5):
    """Finite-difference validation of every loss gradient on a tiny model.

    Builds a 45-parameter model and one fixed batch, freezes the
    stop-gradient quantities (weights and auxiliary targets) at the base
    point, and compares analytic gradients against central differences for
    the three losses and the composed extractor objective. Biases are
    perturbed away from zero so no ReLU sits exactly on its kink, where
    central differences are meaningless. Returns {name: GradCheckReport}.
    """
    from .nn import check_gradients

    rng = np.random.default_rng(np.random.SeedSequence((seed, 77)))
    batch, n_features, dim, k, m = 6, 3, 2, 2, 2
    config = TrainConfig(
        n_clusters=k,
        embed_dim=dim,
        encoder_hidden=(2,),
        decoder_hidden=(2,),
        discriminator_hidden=(2,),
        input_dropout=0.0,
        seed=seed,
    )
    model = build_model(n_features, m, config)
    for net in (model.encoder, model.decoder, model.discriminator):
        for layer in net.layers:
            layer.bias += rng.normal(0.0, 0.3, size=layer.bias.shape)
    model.centroids[...] = rng.normal(size=(k, dim))
    x = rng.normal(size=(batch, n_features))
    subgroups = rng.integers(m, size=batch)

    state = compute_batch_state(model, model.encoder.forward(x), config)
    w, q = state.weights, state.targets
    enc, dec, disc = model.encoder, model.decoder, model.discriminator
    alpha, beta = config.alpha, config.beta

    def recon_loss():
        return reconstruction_loss(x, dec.forward(enc.forward(x)), w)

    def recon_grads():
        z = enc.forward(x)
        dz, dec_g = dec.backward(reconstruction_grad(x, dec.forward(z), w))
        _, enc_g = enc.backward(dz)
        return enc_g + dec_g

    def adv_loss():
        return subgroup_cross_entropy(disc.forward(enc.forward(x)), subgroups, w)

    def adv_grads():
        z = enc.forward(x)
        logits = disc.forward(z)
        dz, disc_g = disc.backward(subgroup_cross_entropy_grad(logits, subgroups, w))
        _, enc_g = enc.backward(dz)
        return enc_g + disc_g

    def kl_loss():
        z = enc.forward(x)
        return clustering_kl_loss(soft_assignments(z, model.centroids), q, w)

    def kl_grads():
        z = enc.forward(x)
        dz, dmu = clustering_kl_grads(z, model.centroids, q, w)
        _, enc_g = enc.backward(dz)
        return enc_g + [dmu]

    def composed_loss():
        return alpha * recon_loss() + kl_loss() - beta * adv_loss()

    def composed_grads():
        z = enc.forward(x)
        dz_r, dec_g = dec.backward(alpha * reconstruction_grad(x, dec.forward(z), w))
        dz_k, dmu = clustering_kl_grads(z, model.centroids, q, w)
        logits = disc.forward(z)
        dz_a, disc_g = disc.backward(subgroup_cross_entropy_grad(logits, subgroups, w))
        _, enc_g = enc.backward(dz_r + dz_k - beta * dz_a)
        return enc_g + dec_g + [dmu] + [-beta * g for g in disc_g]

    checks = {
        "reconstruction": (enc.parameters() + dec.parameters(), recon_loss, recon_grads),
        "adversarial": (enc.parameters() + disc.parameters(), adv_loss, adv_grads),
        "clustering": (enc.parameters() + [model.centroids], kl_loss, kl_grads),
        "composed": (
            enc.parameters() + dec.parameters() + [model.centroids] + disc.parameters(),
            composed_loss,
            composed_grads,
        ),
    }
    return {
        name: check_gradients(params, loss_fn, grad_fn, step=step, tolerance=tolerance)
        for name, (params, loss_fn, grad_fn) in checks.items()
    }


# ---------------------------------------------------------------------------
# checkpointing


def save_checkpoint(model: DcfodModel, config: TrainConfig, path: str | Path) -> None:
    """Persist all parameters plus a config echo; enough to re-emit identical
    scores for the same feature matrix via ``load_checkpoint``."""
    arrays: dict[str, Array] = {"centroids": model.centroids}
    nets = {"encoder": model.encoder, "decoder": model.decoder}
    if model.discriminator is not None:
        nets["discriminator"] = model.discriminator
    widths = {}
    for name, net in nets.items():
        widths[name] = list(net.widths)
        for i, layer in enumerate(net.layers):
            arrays[f"{name}_w{i}"] = layer.weight
            arrays[f"{name}_b{i}"] = layer.bias
    meta = {
        "format_version": CHECKPOINT_VERSION,
        "config": config.to_dict(),
        "widths": widths,
        "input_dropout": model.encoder.input_dropout,
    }
    with Path(path).open("wb") as fh:
        np.savez(fh, meta=np.array(json.dumps(meta, sort_keys=True)), **arrays)


def load_checkpoint(path: str | Path) -> tuple[DcfodModel, TrainConfig]:
    with np.load(path) as bundle:
        meta = json.loads(str(bundle["meta"]))
        if meta["format_version"] != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {meta['format_version']}")
        config = TrainConfig.from_dict(meta["config"])
        nets: dict[str, Mlp | None] = {"discriminator": None}
        for name, widths in meta["widths"].items():
            dropout = meta["input_dropout"] if name == "encoder" else 0.0
            net = Mlp(tuple(widths), np.random.default_rng(0), input_dropout=dropout)
            for i, layer in enumerate(net.layers):
                layer.weight = np.array(bundle[f"{name}_w{i}"])
                layer.bias = np.array(bundle[f"{name}_b{i}"])
            nets[name] = net
        centroids = np.array(bundle["centroids"])
    return (
        DcfodModel(
            encoder=nets["encoder"],
            decoder=nets["decoder"],
            discriminator=nets["discriminator"],
            centroids=centroids,
        ),
        config,
    )
