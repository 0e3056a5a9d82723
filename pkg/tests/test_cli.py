"""End-to-end command-line workflows via direct main() calls."""

import numpy as np
import pytest

from qdiscord.cli import main
from qdiscord.quantum_core import write_state_file

TINY_TRAIN = [
    "--model", "dbnn", "--steps", "60", "--degree", "2", "--hidden", "4",
    "--lr0", "0.1", "--log-every", "30", "--seed", "3",
]


@pytest.fixture(scope="module")
def xdata(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "x.txt"
    code = main(["gen-data", "--family", "xstate", "--size", "12",
                 "--seed", "9", "--out", str(path)])
    assert code == 0
    return str(path)


@pytest.fixture(scope="module")
def checkpoint(tmp_path_factory, xdata):
    path = tmp_path_factory.mktemp("ckpt") / "model.qdc"
    code = main(["train", "--data", xdata, "--out", str(path), *TINY_TRAIN])
    assert code == 0
    return str(path)


class TestBasics:
    def test_feature_dim_output(self, capsys):
        assert main(["feature-dim", "-n", "7", "--degree", "6"]) == 0
        out = capsys.readouterr().out
        assert "1716" in out
        assert "config:" in out

    def test_version_flag(self):
        with pytest.raises(SystemExit) as info:
            main(["--version"])
        assert info.value.code == 0

    def test_usage_error_exits_two(self):
        with pytest.raises(SystemExit) as info:
            main(["feature-dim", "-n", "7"])  # missing --degree
        assert info.value.code == 2

    def test_unknown_command_exits_two(self):
        with pytest.raises(SystemExit) as info:
            main(["entangle-everything"])
        assert info.value.code == 2


class TestDataCommands:
    def test_gen_data_and_validate(self, xdata, capsys):
        assert main(["validate-data", "--data", xdata]) == 0
        assert "12/12" in capsys.readouterr().out

    def test_gen_data_real_reports_rejections(self, tmp_path, capsys):
        out = tmp_path / "r.txt"
        assert main(["gen-data", "--family", "real", "--size", "5",
                     "--seed", "4", "--out", str(out)]) == 0
        text = capsys.readouterr().out
        assert "wrote 5 real records" in text
        assert "rejection sampling:" in text

    def test_validate_missing_file_exits_one(self, capsys):
        assert main(["validate-data", "--data", "/nonexistent/x.txt"]) == 1
        assert "error:" in capsys.readouterr().err


class TestDiscordCommand:
    def test_bell_state(self, tmp_path, capsys):
        bell = np.zeros((4, 4), dtype=complex)
        bell[0, 0] = bell[0, 3] = bell[3, 0] = bell[3, 3] = 0.5
        path = tmp_path / "bell.txt"
        write_state_file(bell, str(path))
        assert main(["discord", "--state", str(path)]) == 0
        out = capsys.readouterr().out
        assert "quantum_discord = 1.000000" in out
        assert "mutual_information = 2.000000" in out
        assert "c_min = 0.000000" in out

    def test_bad_state_file_exits_one(self, tmp_path, capsys):
        path = tmp_path / "junk.txt"
        path.write_text("dim 4\n1 2 3\n")
        assert main(["discord", "--state", str(path)]) == 1
        assert "error:" in capsys.readouterr().err


class TestModelCommands:
    def test_train_writes_checkpoint_and_log(self, tmp_path, xdata, capsys):
        ckpt = tmp_path / "m.qdc"
        log = tmp_path / "traj.txt"
        code = main(["train", "--data", xdata, "--out", str(ckpt),
                     "--log", str(log), *TINY_TRAIN])
        assert code == 0
        out = capsys.readouterr().out
        assert "final train loss" in out
        assert ckpt.exists() and log.exists()
        header = log.read_text().splitlines()[0]
        assert header.split() == ["step", "lr", "loss"]

    def test_eval_prints_loss_and_scatter(self, tmp_path, xdata, checkpoint, capsys):
        scatter = tmp_path / "pairs.txt"
        assert main(["eval", "--checkpoint", checkpoint, "--data", xdata,
                     "--scatter-out", str(scatter)]) == 0
        assert "loss = " in capsys.readouterr().out
        lines = scatter.read_text().splitlines()
        assert lines[0] == "label\tprediction"
        assert len(lines) == 13

    def test_predict_with_oracle(self, tmp_path, xdata, checkpoint, capsys):
        with open(xdata) as fh:
            fh.readline()
            row = fh.readline().split()
        params = tmp_path / "p.txt"
        params.write_text(" ".join(row[:7]) + "\n")
        assert main(["predict", "--checkpoint", checkpoint,
                     "--params", str(params), "--oracle"]) == 0
        out = capsys.readouterr().out
        assert "prediction = " in out
        assert "oracle = " in out
        assert "abs_error = " in out

    def test_predict_oracle_on_product_state(self, tmp_path, checkpoint, capsys):
        # diagonal X-state that factorizes: measuring B cannot disturb A,
        # so the oracle minimum equals the entropy of A's marginal
        params = tmp_path / "prod.txt"
        params.write_text("0.28 0.42 0.12 0 0 0 0\n")
        assert main(["predict", "--checkpoint", checkpoint,
                     "--params", str(params), "--oracle"]) == 0
        out = capsys.readouterr().out
        oracle = float(next(l for l in out.splitlines() if l.startswith("oracle")).split()[-1])
        h_a = -(0.7 * np.log2(0.7) + 0.3 * np.log2(0.3))
        assert oracle == pytest.approx(h_a, abs=1e-6)

    def test_predict_family_mismatch_exits_one(self, tmp_path, checkpoint, capsys):
        params = tmp_path / "p9.txt"
        params.write_text("0.25 0.25 0.25 0 0 0 0 0 0\n")
        assert main(["predict", "--checkpoint", checkpoint,
                     "--params", str(params)]) == 1
        err = capsys.readouterr().err
        assert "error:" in err and "features" in err

    def test_eval_family_mismatch_exits_one(self, tmp_path, checkpoint, capsys):
        rdata = tmp_path / "r.txt"
        assert main(["gen-data", "--family", "real", "--size", "3",
                     "--seed", "5", "--out", str(rdata)]) == 0
        capsys.readouterr()
        assert main(["eval", "--checkpoint", checkpoint, "--data", str(rdata)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_replicate_self_generated(self, tmp_path, capsys):
        report = tmp_path / "rep.txt"
        code = main([
            "replicate", "--family", "xstate", "--train-size", "8",
            "--test-size", "4", "--data-seed", "77", "--runs", "2",
            "--model", "nn", "--steps", "40", "--degree", "2", "--hidden", "4",
            "--log-every", "20", "--out", str(report),
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "model\trun\ttrain_loss_x1e3\ttest_loss_x1e3" in out
        assert report.exists()

    def test_replicate_requires_test_data_with_data(self, xdata, capsys):
        assert main(["replicate", "--data", xdata, "--model", "nn"]) == 1
        assert "test-data" in capsys.readouterr().err


class TestSweepExample:
    def test_sweep_without_model(self, capsys):
        assert main(["sweep-example", "--a-min", "0", "--a-max", "0.2",
                     "--count", "3"]) == 0
        out = capsys.readouterr().out
        assert "a\ts_z\ts_x\ts_y\tanalytic_min\toracle_c\tmodel_pred\tvalid" in out
        rows = [l for l in out.splitlines() if l and l[0] in "-0123456789"]
        assert len(rows) == 3
        first = rows[0].split("\t")
        assert float(first[0]) == 0.0
        assert abs(float(first[4]) - float(first[5])) < 1e-4  # analytic vs oracle at a=0
        assert first[7] == "1"

    def test_sweep_marks_invalid_region(self, tmp_path, capsys):
        out_file = tmp_path / "sweep.txt"
        assert main(["sweep-example", "--a-min", "-0.3", "--a-max", "-0.2",
                     "--count", "2", "--out", str(out_file)]) == 0
        rows = out_file.read_text().splitlines()[1:]
        for row in rows:
            fields = row.split("\t")
            assert fields[7] == "0"
            assert fields[5] == "nan"  # oracle skipped outside validity

    def test_sweep_with_model_prediction(self, checkpoint, capsys):
        assert main(["sweep-example", "--a-min", "0", "--a-max", "0.1",
                     "--count", "2", "--checkpoint", checkpoint]) == 0
        rows = [l for l in capsys.readouterr().out.splitlines()
                if l and l[0] in "-0123456789"]
        for row in rows:
            assert row.split("\t")[6] != "nan"
