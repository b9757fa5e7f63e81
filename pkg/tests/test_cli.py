import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from fairadapt.cli import main


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def sim_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("sim")
    rc = run(
        "simulate", "--name", "synthetic_b", "--n", "1200", "--seed", "3",
        "--split", "0.75", "--out-dir", out,
    )
    assert rc == 0
    return out


class TestSimulate:
    def test_outputs_exist(self, sim_dir):
        for name in ("data.csv", "meta.json", "graph.json", "quantiles.csv", "train.csv", "test.csv", "manifest.json"):
            assert (sim_dir / name).exists()

    def test_split_sizes(self, sim_dir):
        train = (sim_dir / "train.csv").read_text().strip().splitlines()
        test = (sim_dir / "test.csv").read_text().strip().splitlines()
        assert len(train) - 1 == 900
        assert len(test) - 1 == 300


class TestAdapt:
    def test_happy_path(self, sim_dir, tmp_path):
        out = tmp_path / "adapted"
        rc = run(
            "adapt",
            "--graph", sim_dir / "graph.json",
            "--meta", sim_dir / "meta.json",
            "--train", sim_dir / "train.csv",
            "--test", sim_dir / "test.csv",
            "--resolving", "X2",
            "--baseline", "0",
            "--seed", "7",
            "--num-trees", "30",
            "--emit-quantiles",
            "--training-option", "b",
            "--emit-model",
            "--out-dir", out,
        )
        assert rc == 0
        for name in ("train_adapted.csv", "test_adapted.csv", "train_quantiles.csv", "predictions.csv", "model_summary.json", "manifest.json"):
            assert (out / name).exists()
        header = (out / "train_adapted.csv").read_text().splitlines()[0]
        assert header == "A,X1,X2,X3,Y"
        # resolving X2 leaves the column bit-identical to the input
        def col(path, idx):
            return [l.split(",")[idx] for l in Path(path).read_text().strip().splitlines()[1:]]

        assert col(out / "train_adapted.csv", 2) == col(sim_dir / "train.csv", 2)
        preds = [float(l) for l in (out / "predictions.csv").read_text().strip().splitlines()]
        assert len(preds) == 300
        summary = json.loads((out / "model_summary.json").read_text())
        assert summary["training_option"] == "b"

    def test_replay_reproduces_digests(self, sim_dir, tmp_path):
        out = tmp_path / "first"
        rc = run(
            "adapt",
            "--graph", sim_dir / "graph.json",
            "--meta", sim_dir / "meta.json",
            "--train", sim_dir / "train.csv",
            "--baseline", "0",
            "--seed", "11",
            "--num-trees", "20",
            "--out-dir", out,
        )
        assert rc == 0
        replay_out = tmp_path / "second"
        rc = run("replay", "--manifest", out / "manifest.json", "--out-dir", replay_out)
        assert rc == 0
        a = hashlib.sha256((out / "train_adapted.csv").read_bytes()).hexdigest()
        b = hashlib.sha256((replay_out / "train_adapted.csv").read_bytes()).hexdigest()
        assert a == b

    def test_aps_override_file(self, sim_dir, tmp_path):
        aps = tmp_path / "aps.json"
        aps.write_text(json.dumps({"X3": []}))  # keep X3's parents original
        out = tmp_path / "adapted"
        rc = run(
            "adapt", "--graph", sim_dir / "graph.json", "--meta", sim_dir / "meta.json",
            "--train", sim_dir / "train.csv", "--baseline", "0", "--seed", "3",
            "--num-trees", "15", "--aps", aps, "--out-dir", out,
        )
        assert rc == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert str(aps) in manifest["inputs"]

    def test_replay_mismatch_is_numerical_failure(self, sim_dir, tmp_path):
        out = tmp_path / "run"
        rc = run(
            "adapt", "--graph", sim_dir / "graph.json", "--meta", sim_dir / "meta.json",
            "--train", sim_dir / "train.csv", "--baseline", "0", "--seed", "2",
            "--num-trees", "10", "--out-dir", out,
        )
        assert rc == 0
        doc = json.loads((out / "manifest.json").read_text())
        name = next(iter(doc["outputs"]))
        doc["outputs"][name] = "0" * 64  # corrupt the recorded digest
        (out / "manifest.json").write_text(json.dumps(doc))
        rc = run("replay", "--manifest", out / "manifest.json", "--out-dir", tmp_path / "again")
        assert rc == 2

    def test_validation_failure_exit_code(self, sim_dir, tmp_path):
        rc = run(
            "adapt",
            "--graph", sim_dir / "graph.json",
            "--meta", sim_dir / "meta.json",
            "--train", sim_dir / "train.csv",
            "--baseline", "9",  # not a level
            "--out-dir", tmp_path / "x",
        )
        assert rc == 1

    def test_baseline_required_for_multilevel(self, tmp_path):
        graph = {"nodes": ["A", "X", "Y"], "edges": [["A", "X"], ["X", "Y"]], "protected": "A", "outcome": "Y"}
        meta = {
            "columns": {
                "A": {"kind": "discrete_ordered", "levels": ["a", "b", "c"], "role": "attribute"},
                "X": {"kind": "continuous", "role": "feature"},
                "Y": {"kind": "discrete_ordered", "levels": ["0", "1"], "role": "outcome"},
            }
        }
        rng = np.random.default_rng(0)
        rows = ["A,X,Y"]
        for i in range(60):
            rows.append(f"{'abc'[i % 3]},{rng.normal():.4f},{i % 2}")
        (tmp_path / "g.json").write_text(json.dumps(graph))
        (tmp_path / "m.json").write_text(json.dumps(meta))
        (tmp_path / "d.csv").write_text("\n".join(rows) + "\n")
        rc = run(
            "adapt", "--graph", tmp_path / "g.json", "--meta", tmp_path / "m.json",
            "--train", tmp_path / "d.csv", "--num-trees", "10",
            "--out-dir", tmp_path / "out",
        )
        assert rc == 1


def test_threads_env_default(monkeypatch):
    from fairadapt.cli import build_parser

    monkeypatch.setenv("FAIRADAPT_THREADS", "3")
    args = build_parser().parse_args(
        ["simulate", "--name", "synthetic_a", "--out-dir", "x"]
    )
    assert args.threads == 3


class TestEvaluate:
    def test_report_and_density(self, tmp_path):
        rng = np.random.default_rng(5)
        n = 400
        probs = rng.random(n)
        labels = (rng.random(n) < probs).astype(int)
        attr = rng.integers(0, 2, n)
        (tmp_path / "p.txt").write_text("".join(f"{v}\n" for v in probs))
        (tmp_path / "l.txt").write_text("".join(f"{v}\n" for v in labels))
        (tmp_path / "a.txt").write_text("".join(f"{v}\n" for v in attr))
        out = tmp_path / "report.json"
        rc = run(
            "evaluate", "--probs", tmp_path / "p.txt", "--labels", tmp_path / "l.txt",
            "--attr", tmp_path / "a.txt", "--k", "4", "--out", out,
            "--density-out", tmp_path / "d.csv",
        )
        assert rc == 0
        report = json.loads(out.read_text())
        assert report["calibration_k"] == 4
        dens = (tmp_path / "d.csv").read_text().strip().splitlines()
        assert dens[0] == "bin_lo,bin_hi,density_group0,density_group1"
        assert len(dens) == 41

    def test_constant_predictions_zero_gap(self, tmp_path):
        (tmp_path / "p.txt").write_text("1.0\n" * 40)
        (tmp_path / "l.txt").write_text("".join(f"{i % 2}\n" for i in range(40)))
        (tmp_path / "a.txt").write_text("".join(f"{i // 20}\n" for i in range(40)))
        out = tmp_path / "r.json"
        rc = run(
            "evaluate", "--probs", tmp_path / "p.txt", "--labels", tmp_path / "l.txt",
            "--attr", tmp_path / "a.txt", "--out", out,
        )
        assert rc == 0
        assert json.loads(out.read_text())["parity_gap"] == 0.0

    def test_misaligned_exit_code(self, tmp_path):
        (tmp_path / "p.txt").write_text("0.5\n0.5\n")
        (tmp_path / "l.txt").write_text("1\n")
        (tmp_path / "a.txt").write_text("0\n1\n")
        rc = run(
            "evaluate", "--probs", tmp_path / "p.txt", "--labels", tmp_path / "l.txt",
            "--attr", tmp_path / "a.txt",
        )
        assert rc == 1


class TestExperimentCmd:
    def test_appendix_b_demo(self, tmp_path):
        rc = run(
            "experiment", "--name", "appendix_b_demo", "--n", "20000",
            "--seed", "2", "--out-dir", tmp_path,
        )
        assert rc == 0
        lines = (tmp_path / "results.csv").read_text().strip().splitlines()
        assert lines[0].startswith("seed,")
        assert len(lines) == 2

    def test_unknown_name(self, tmp_path):
        rc = run("experiment", "--name", "nope", "--out-dir", tmp_path)
        assert rc == 1


class TestPreprocessCmd:
    def test_recipe_file(self, tmp_path):
        (tmp_path / "d.csv").write_text("a,b\n1,x\n2,y\n")
        (tmp_path / "m.json").write_text(json.dumps({"columns": {
            "a": {"kind": "continuous", "role": "feature"},
            "b": {"kind": "categorical_unordered", "levels": ["x", "y"], "role": "feature"},
        }}))
        (tmp_path / "r.json").write_text(json.dumps({"drop": ["b"]}))
        rc = run(
            "preprocess", "--data", tmp_path / "d.csv", "--meta", tmp_path / "m.json",
            "--recipe", tmp_path / "r.json", "--out-dir", tmp_path / "out",
        )
        assert rc == 0
        assert (tmp_path / "out" / "preprocessed.csv").read_text().splitlines()[0] == "a"

    def test_missing_file_exit_code(self, tmp_path):
        rc = run(
            "preprocess", "--data", tmp_path / "missing.csv", "--meta", tmp_path / "m.json",
            "--recipe", "adult", "--out-dir", tmp_path / "out",
        )
        assert rc == 1
