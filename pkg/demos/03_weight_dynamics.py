"""Watch the dynamic weights separate inliers from outliers.

During training every minibatch row gets a weight (softmax of negated
outlier scores, summing to one over the batch). In a batch of 64 each row's
"neutral" share is 1/64 ~ 0.0156; as the cluster structure firms up,
inliers drift above that and outliers sink below it. This script logs batch
weights by ground-truth label across training.
"""

import numpy as np

from dcfod import SyntheticConfig, TrainConfig, fit, make_synthetic

dataset = make_synthetic(
    SyntheticConfig(n_samples=640, n_features=10, n_clusters=4,
                    outlier_rate=0.15, center_spread=3.0, seed=3)
)
labels = dataset.labels

config = TrainConfig(
    n_clusters=8,
    embed_dim=8,
    encoder_hidden=(64, 32),
    decoder_hidden=(32, 64),
    discriminator_hidden=(64, 32),
    optimizer="adam",
    learning_rate=3e-4,
    centroid_learning_rate=3e-3,
    epochs=60,
    batch_size=64,
    beta=50.0,
    seed=0,
)

# recover each batch's rows from the deterministic shuffle so weights can
# be attributed to ground-truth labels
from dcfod.data import BatchPlan, iterate_batches
from dcfod.model import _training_seeds

_, shuffle_seed = _training_seeds(config)
plan = BatchPlan(batch_size=config.batch_size, seed=shuffle_seed, epochs=config.epochs)

schedule = []
for epoch in range(config.epochs):
    schedule.extend(iterate_batches(dataset.n_samples, plan, epoch))

step = 0
per_epoch = {"in": [], "out": []}
trace = []


def track(state):
    global step
    idx = schedule[step]
    step += 1
    batch_labels = labels[idx]
    if batch_labels.min() != batch_labels.max():
        per_epoch["in"].append(state.weights[batch_labels == 0].mean())
        per_epoch["out"].append(state.weights[batch_labels == 1].mean())
    if step % len(iterate_batches(dataset.n_samples, plan, 0)) == 0:
        trace.append((np.mean(per_epoch["in"]), np.mean(per_epoch["out"])))
        per_epoch["in"].clear()
        per_epoch["out"].clear()


fit(dataset.x, dataset.subgroups, config, batch_callback=track)

neutral = 1.0 / config.batch_size
print(f"neutral weight = 1/{config.batch_size} = {neutral:.4f}\n")
print("epoch | mean inlier weight | mean outlier weight | ratio")
for epoch in range(0, len(trace), 6):
    w_in, w_out = trace[epoch]
    print(f"{epoch:5d} | {w_in:.5f}            | {w_out:.5f}             | "
          f"{w_in / w_out:.2f}x")
w_in, w_out = trace[-1]
print(f"final | {w_in:.5f}            | {w_out:.5f}             | {w_in / w_out:.2f}x")
