import json

import numpy as np
import pytest

from dcfod.cli import main
from dcfod.data import DatasetSchema, SyntheticConfig, write_synthetic_csv

TINY_TRAIN_DOC = {
    "n_clusters": 2,
    "embed_dim": 3,
    "encoder_hidden": [5],
    "decoder_hidden": [5],
    "discriminator_hidden": [4],
    "input_dropout": 0.0,
    "epochs": 2,
    "batch_size": 16,
}


@pytest.fixture
def synth_files(tmp_path):
    cfg = SyntheticConfig(n_samples=60, n_features=4, n_clusters=2,
                          outlier_rate=0.1, subgroup_bias=0.2, seed=5)
    data = tmp_path / "data.csv"
    schema = tmp_path / "schema.json"
    write_synthetic_csv(cfg, data, schema)
    return data, schema


@pytest.fixture
def config_file(tmp_path):
    doc = {
        "name": "demo",
        "synthetic": {"n_samples": 60, "n_features": 4, "n_clusters": 2,
                      "outlier_rate": 0.1, "subgroup_bias": 0.2, "seed": 5},
        "train": TINY_TRAIN_DOC,
        "seeds": [0, 1],
    }
    path = tmp_path / "exp.json"
    path.write_text(json.dumps(doc))
    return path


class TestSynth:
    def test_writes_csv_and_schema(self, tmp_path, capsys):
        out = tmp_path / "gen"
        code = main(["synth", "--n", "100", "--features", "5", "--rate", "0.1",
                     "--bias", "0.3", "--seed", "7", "--out", str(out)])
        assert code == 0
        assert (out / "data.csv").exists()
        assert (out / "schema.json").exists()
        schema = DatasetSchema.load(out / "schema.json")
        assert schema.sensitive_column == "group"
        rows = (out / "data.csv").read_text().strip().splitlines()
        assert len(rows) == 101  # header + rows

    def test_env_var_default_output(self, tmp_path, monkeypatch):
        target = tmp_path / "from_env"
        monkeypatch.setenv("DCFOD_OUTPUT_DIR", str(target))
        assert main(["synth", "--n", "50", "--features", "3", "--seed", "1"]) == 0
        assert (target / "data.csv").exists()


class TestTrain:
    def test_train_with_config(self, config_file, tmp_path, capsys):
        out = tmp_path / "run"
        assert main(["train", "--config", str(config_file), "--out", str(out),
                     "--quiet"]) == 0
        assert (out / "scores_seed0.csv").exists()
        assert (out / "checkpoint_seed0.npz").exists()
        assert "artifacts in" in capsys.readouterr().out

    def test_train_without_labels_succeeds(self, synth_files, tmp_path):
        data, schema_path = synth_files
        schema = DatasetSchema.load(schema_path)
        unlabeled = DatasetSchema(
            feature_columns=schema.feature_columns,
            sensitive_column=schema.sensitive_column,
        )
        bare = tmp_path / "bare_schema.json"
        unlabeled.save(bare)
        cfg = {
            "name": "bare",
            "csv_path": str(data),
            "schema_path": str(bare),
            "train": TINY_TRAIN_DOC,
            "seeds": [0],
        }
        cfg_path = tmp_path / "bare.json"
        cfg_path.write_text(json.dumps(cfg))
        out = tmp_path / "bare_out"
        assert main(["train", "--config", str(cfg_path), "--out", str(out),
                     "--quiet"]) == 0
        assert (out / "scores_seed0.csv").exists()

    def test_train_takes_first_seed_only(self, config_file, tmp_path):
        out = tmp_path / "first_seed"
        assert main(["train", "--config", str(config_file), "--out", str(out),
                     "--quiet"]) == 0
        results = json.loads((out / "results.json").read_text())
        assert len(results["seed_results"]) == 1

    def test_mode_flag_overrides(self, config_file, tmp_path):
        out = tmp_path / "dcod_run"
        assert main(["train", "--config", str(config_file), "--out", str(out),
                     "--mode", "dcod", "--quiet"]) == 0
        results = json.loads((out / "results.json").read_text())
        assert results["config"]["train"]["mode"] == "no_adversary"

    def test_missing_inputs_is_an_error(self, capsys):
        assert main(["train", "--quiet"]) == 1
        assert "error" in capsys.readouterr().err


class TestBench:
    def test_bench_writes_aggregates(self, config_file, tmp_path, capsys):
        out = tmp_path / "bench"
        assert main(["bench", "--config", str(config_file), "--out", str(out),
                     "--quiet"]) == 0
        results = json.loads((out / "results.json").read_text())
        assert len(results["seed_results"]) == 2
        assert "auc" in results["aggregates"]
        stdout = capsys.readouterr().out
        assert "AUC" in stdout

    def test_seed_count_flag(self, config_file, tmp_path):
        out = tmp_path / "bench3"
        assert main(["bench", "--config", str(config_file), "--out", str(out),
                     "--seeds", "3", "--quiet"]) == 0
        results = json.loads((out / "results.json").read_text())
        assert [r["seed"] for r in results["seed_results"]] == [0, 1, 2]

    def test_explicit_seed_list(self, config_file, tmp_path):
        out = tmp_path / "bench_list"
        assert main(["bench", "--config", str(config_file), "--out", str(out),
                     "--seed-list", "7,3", "--quiet"]) == 0
        results = json.loads((out / "results.json").read_text())
        assert [r["seed"] for r in results["seed_results"]] == [3, 7]

    def test_bench_requires_labels(self, synth_files, tmp_path, capsys):
        data, schema_path = synth_files
        schema = DatasetSchema.load(schema_path)
        unlabeled = DatasetSchema(
            feature_columns=schema.feature_columns,
            sensitive_column=schema.sensitive_column,
        )
        bare = tmp_path / "bare_schema.json"
        unlabeled.save(bare)
        code = main(["bench", "--data", str(data), "--schema", str(bare),
                     "--out", str(tmp_path / "x"), "--quiet"])
        assert code == 1
        assert "label" in capsys.readouterr().err

    def test_byte_identical_reruns(self, config_file, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        for out in (out_a, out_b):
            assert main(["bench", "--config", str(config_file), "--out", str(out),
                         "--quiet"]) == 0
        for name in ("results.json", "summary.txt", "scores_seed0.csv",
                     "scores_seed1.csv"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


class TestSweep:
    def test_beta_sweep(self, config_file, tmp_path, capsys):
        out = tmp_path / "sweep"
        assert main(["sweep", "--config", str(config_file), "--axis", "beta",
                     "--values", "0,1", "--out", str(out), "--quiet"]) == 0
        summary = (out / "sweep_summary.txt").read_text()
        assert "w/o adversarial training" in summary

    def test_sweep_needs_values(self, config_file, tmp_path, capsys):
        code = main(["sweep", "--config", str(config_file), "--axis", "beta",
                     "--out", str(tmp_path / "x"), "--quiet"])
        assert code == 1

    def test_sweep_axis_from_config_file(self, tmp_path):
        doc = {
            "name": "cfg_sweep",
            "synthetic": {"n_samples": 60, "n_features": 4, "n_clusters": 2,
                          "outlier_rate": 0.1, "seed": 5},
            "train": TINY_TRAIN_DOC,
            "seeds": [0],
            "sweep": {"axis": "k", "values": [2, 3]},
        }
        cfg_path = tmp_path / "sweep.json"
        cfg_path.write_text(json.dumps(doc))
        out = tmp_path / "out"
        assert main(["sweep", "--config", str(cfg_path), "--out", str(out),
                     "--quiet"]) == 0
        summary = (out / "sweep_summary.txt").read_text()
        assert summary.count("\n") == 3  # header + two grid rows


class TestEval:
    def test_constant_scores_give_half_auc(self, synth_files, tmp_path, capsys):
        data, schema = synth_files
        scores_path = tmp_path / "scores.csv"
        scores_path.write_text("score\n" + "0.5\n" * 60)
        assert main(["eval", "--scores", str(scores_path), "--data", str(data),
                     "--schema", str(schema)]) == 0
        out = capsys.readouterr().out
        assert "auc:    0.5" in out

    def test_eval_writes_metrics_json(self, synth_files, tmp_path):
        data, schema = synth_files
        rng = np.random.default_rng(0)
        scores_path = tmp_path / "scores.csv"
        scores_path.write_text(
            "score\n" + "\n".join(repr(float(v)) for v in rng.random(60)) + "\n"
        )
        out = tmp_path / "eval_out"
        assert main(["eval", "--scores", str(scores_path), "--data", str(data),
                     "--schema", str(schema), "--out", str(out)]) == 0
        doc = json.loads((out / "metrics.json").read_text())
        assert set(doc) >= {"auc", "f_gap", "f_rank"}

    def test_eval_without_labels_reports_f_rank_only(self, synth_files, tmp_path, capsys):
        data, schema_path = synth_files
        schema = DatasetSchema.load(schema_path)
        unlabeled = DatasetSchema(
            feature_columns=schema.feature_columns,
            sensitive_column=schema.sensitive_column,
        )
        bare = tmp_path / "bare.json"
        unlabeled.save(bare)
        scores_path = tmp_path / "scores.csv"
        rng = np.random.default_rng(1)
        scores_path.write_text(
            "score\n" + "\n".join(repr(float(v)) for v in rng.random(60)) + "\n"
        )
        assert main(["eval", "--scores", str(scores_path), "--data", str(data),
                     "--schema", str(bare)]) == 0
        out = capsys.readouterr().out
        assert "f_rank" in out and "auc" not in out.split("f_rank")[0]

    def test_row_count_mismatch(self, synth_files, tmp_path, capsys):
        data, schema = synth_files
        scores_path = tmp_path / "scores.csv"
        scores_path.write_text("score\n0.5\n")
        assert main(["eval", "--scores", str(scores_path), "--data", str(data),
                     "--schema", str(schema)]) == 1
        assert "rows" in capsys.readouterr().err


class TestGradcheck:
    def test_passes(self, capsys):
        assert main(["gradcheck"]) == 0
        out = capsys.readouterr().out
        assert out.count("pass") == 4

    def test_tolerance_flag(self, capsys):
        # absurdly tight tolerance forces a reported failure and exit 1
        assert main(["gradcheck", "--tolerance", "1e-12"]) == 1


class TestUsage:
    def test_unknown_subcommand_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_no_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_console_script_installed(self):
        import shutil

        assert shutil.which("dcfod") is not None
