import json

import numpy as np
import pytest

from qmultimeter.cli import main
from qmultimeter.sampling import random_povm, rng_from
from qmultimeter.serialize import observable_to_json, save_json

SQRT_HALF = 1 / np.sqrt(2)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDemoCommand:
    def test_q8_exit_zero_and_payload(self, capsys):
        code, out, err = run(capsys, "demo", "q8")
        assert code == 0
        doc = json.loads(out)
        for f in doc["program_fidelities"].values():
            assert abs(f - SQRT_HALF) < 1e-10
        assert set(doc["pvms"]) == {"i", "j", "k"}

    def test_phase_space_dim_flag(self, capsys):
        code, out, _ = run(capsys, "demo", "phase-space", "--dim", "3")
        assert code == 0
        assert json.loads(out)["vector_count"] == 4

    def test_out_file_leaves_stdout_clean(self, tmp_path, capsys):
        target = tmp_path / "demo.json"
        code, out, _ = run(capsys, "demo", "q8", "--out", str(target))
        assert code == 0
        assert out == ""
        assert json.loads(target.read_text())["check"] == "quaternion_demo"


class TestVerifyCommand:
    def test_prop1_default_random_multimeter(self, capsys):
        code, out, _ = run(capsys, "verify", "prop1", "--trials", "1000", "--seed", "0")
        assert code == 0
        doc = json.loads(out)
        assert doc["violations"] == 0
        assert doc["trials"] == 1000

    def test_prop3_q8_fixture(self, capsys):
        code, out, _ = run(
            capsys, "verify", "prop3", "--trials", "500", "--seed", "1", "--fixture", "q8"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["violations"] == 0
        assert doc["fixtures"]["kernel_fidelity"] <= 1e-12

    def test_bprops_small(self, capsys):
        code, out, _ = run(capsys, "verify", "bprops", "--trials", "3", "--seed", "0")
        assert code == 0
        doc = json.loads(out)
        assert doc["check"] == "b_properties"
        assert doc["violations"] == 0

    def test_identical_configs_identical_payloads(self, capsys):
        _, out1, _ = run(capsys, "verify", "prop1", "--trials", "100", "--seed", "3")
        _, out2, _ = run(capsys, "verify", "prop1", "--trials", "100", "--seed", "3")
        d1, d2 = json.loads(out1), json.loads(out2)
        d1.pop("elapsed")
        d2.pop("elapsed")
        assert d1 == d2

    def test_tolerance_override_flag(self, capsys):
        # an absurdly strict slack manufactures violations and exit 1
        code, out, err = run(
            capsys,
            "verify", "prop1", "--trials", "200", "--seed", "0",
            "--tol", "tol_check=-0.5",
        )
        assert code == 1
        assert json.loads(out)["violations"] > 0
        assert "violation" in err

    def test_unknown_tolerance_rejected(self, capsys):
        code, _, err = run(
            capsys, "verify", "prop1", "--trials", "10", "--tol", "bogus=1"
        )
        assert code == 2
        assert "bogus" in err


class TestBoundCommand:
    def test_csv_payload(self, capsys):
        code, out, _ = run(capsys, "bound", "--points", "21")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "t,bound"
        assert len(lines) == 22
        row0 = [ln for ln in lines if ln.startswith("0,")][0]
        assert abs(float(row0.split(",")[1]) - 0.70710678) < 1e-6

    def test_out_file(self, tmp_path, capsys):
        target = tmp_path / "curve.csv"
        code, out, _ = run(capsys, "bound", "--points", "5", "--out", str(target))
        assert code == 0
        assert out == ""
        assert target.read_text().startswith("t,bound")

    def test_json_format_rejected(self, capsys):
        code, _, err = run(capsys, "bound", "--points", "5", "--format", "json")
        assert code == 2
        assert "csv" in err


class TestDivergenceCommand:
    @pytest.fixture
    def observable_files(self, tmp_path):
        rng = rng_from(0)
        paths = []
        for name in ("e1", "e2"):
            e = random_povm(rng, 2, 3)
            p = tmp_path / f"{name}.json"
            save_json(observable_to_json(e), str(p))
            paths.append(str(p))
        return paths

    def test_estimate_payload(self, capsys, observable_files):
        e1, e2 = observable_files
        code, out, _ = run(
            capsys, "divergence", "--e1", e1, "--e2", e2, "--restarts", "4", "--seed", "0"
        )
        assert code == 0
        doc = json.loads(out)
        assert 0.0 <= doc["value"] <= 1.0 + 1e-9
        assert doc["restarts"] == 4
        assert len(doc["argmin"]) == 2

    def test_missing_file_is_config_error(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "divergence", "--e1", str(tmp_path / "nope.json"), "--e2", str(tmp_path / "nope.json")
        )
        assert code == 2
        assert "cannot load" in err

    def test_missing_flags_rejected(self, capsys):
        code, _, err = run(capsys, "divergence")
        assert code == 2


class TestConfigHandling:
    def test_config_file_supplies_values(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"trials": 150, "seed": 4}))
        code, out, _ = run(capsys, "verify", "prop1", "--config", str(cfg))
        assert code == 0
        doc = json.loads(out)
        assert doc["trials"] == 150
        assert doc["seed"] == 4

    def test_flags_beat_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"trials": 150, "seed": 4}))
        code, out, _ = run(
            capsys, "verify", "prop1", "--config", str(cfg), "--trials", "60"
        )
        assert code == 0
        assert json.loads(out)["trials"] == 60

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"trails": 100}))
        code, _, err = run(capsys, "verify", "prop1", "--config", str(cfg))
        assert code == 2
        assert "trails" in err

    def test_env_seed_overrides_config(self, tmp_path, capsys, monkeypatch):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"seed": 4}))
        monkeypatch.setenv("QML_SEED", "99")
        code, out, _ = run(capsys, "verify", "prop1", "--trials", "50", "--config", str(cfg))
        assert code == 0
        assert json.loads(out)["seed"] == 99

    def test_seed_flag_beats_env(self, capsys, monkeypatch):
        monkeypatch.setenv("QML_SEED", "99")
        code, out, _ = run(capsys, "verify", "prop1", "--trials", "50", "--seed", "5")
        assert code == 0
        assert json.loads(out)["seed"] == 5

    def test_bad_env_seed_rejected(self, capsys, monkeypatch):
        monkeypatch.setenv("QML_SEED", "not-a-number")
        code, _, err = run(capsys, "verify", "prop1", "--trials", "10")
        assert code == 2
        assert "QML_SEED" in err
