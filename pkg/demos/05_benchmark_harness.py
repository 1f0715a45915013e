"""Drive the experiment harness from Python: a multi-seed benchmark and a
beta sweep, writing reports into ./runs/demo.

The same experiments run from the shell:

    dcfod bench --config demo_config.json --out runs/demo/bench
    dcfod sweep --config demo_config.json --axis beta --values 0,10,50 \
        --out runs/demo/sweep
"""

from pathlib import Path

from dcfod import SyntheticConfig, TrainConfig
from dcfod.harness import ExperimentConfig, run_experiment, run_sweep

out_root = Path("runs/demo")

train = TrainConfig(
    n_clusters=4,
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
)

experiment = ExperimentConfig(
    name="biased_blobs",
    train=train,
    seeds=[0, 1, 2, 3, 4],
    synthetic=SyntheticConfig(
        n_samples=800,
        n_features=8,
        n_clusters=3,
        outlier_rate=0.2,
        subgroup_bias=0.3,
        subgroup_shift=3.5,
        subgroup_noise=0.5,
        seed=42,
    ),
)

record = run_experiment(experiment, out_root / "bench")
print((out_root / "bench" / "summary.txt").read_text())
for seed_result in record.seed_results:
    status = seed_result.error or f"auc={seed_result.metrics.auc:.4f}"
    print(f"  seed {seed_result.seed}: {status}")

# sweep the adversarial weight; beta=0 is the no-adversary corner
sweep_cfg = ExperimentConfig(
    name="beta_sweep",
    train=train,
    seeds=[0, 1, 2],
    synthetic=experiment.synthetic,
    sweep_axis="beta",
    sweep_values=[0.0, 10.0, 50.0],
)
run_sweep(sweep_cfg, out_root / "sweep")
print()
print((out_root / "sweep" / "sweep_summary.txt").read_text())
