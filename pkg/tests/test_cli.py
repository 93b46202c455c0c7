import json
import subprocess
import sys

import pytest

from hpai.cli import main
from hpai.motion import load_motion_db

SMALL = """
[profiles.a]
dominant = "r"
seed = 1

[search]
budget = 8

[game]
round_frames = 300

[experiment]
rounds = 1
bootstrap_rounds = 1
seed = 3
"""


@pytest.fixture
def small_cfg(tmp_path):
    p = tmp_path / "exp.toml"
    p.write_text(SMALL)
    return p


def test_check_config_default(capsys):
    assert main(["check-config"]) == 0
    assert "5 profile" in capsys.readouterr().out


def test_bad_config_exits_2(tmp_path, capsys):
    p = tmp_path / "bad.toml"
    p.write_text("[profiles.a]\n[experiment]\nrounds = 0\n")
    assert main(["check-config", "--config", str(p)]) == 2
    assert "rounds" in capsys.readouterr().err


def test_unparseable_toml_exits_2(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text("[profiles\n")
    assert main(["check-config", "--config", str(p)]) == 2


def test_missing_config_exits_3(tmp_path):
    assert main(["check-config", "--config", str(tmp_path / "nope.toml")]) == 3


def test_simulate_and_analyze(small_cfg, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["simulate", "--config", str(small_cfg), "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "baseline" in text and "hpai" in text
    assert (out / "bal_summary.csv").exists()
    assert main(["analyze", "--series", str(out / "series_a_hpai_0.csv")]) == 0
    assert "final Bal" in capsys.readouterr().out


def test_bootstrap_then_build_a2c(small_cfg, tmp_path):
    out = tmp_path / "boot"
    assert main(["simulate", "--config", str(small_cfg), "--out", str(out), "--bootstrap-only"]) == 0
    target = tmp_path / "a2c.json"
    assert main(["build-a2c", "--logs", str(out / "bootstrap" / "*.jsonl"), "--out", str(target)]) == 0
    rebuilt = json.loads(target.read_text())
    assert rebuilt == json.loads((out / "a2c_a.json").read_text())


def test_build_a2c_no_logs_exits_3(tmp_path):
    assert main(["build-a2c", "--logs", str(tmp_path / "*.jsonl"), "--out", str(tmp_path / "x.json")]) == 3


def test_recordings_to_motiondb(tmp_path, capsys):
    rec = tmp_path / "rec"
    assert main(["gen-recordings", "--out", str(rec), "right_punch", "crouch"]) == 0
    assert len(list(rec.glob("*.skel.csv"))) == 6
    db_path = tmp_path / "db.json"
    assert main(["build-motiondb", "--samples", str(rec), "--out", str(db_path)]) == 0
    db = load_motion_db(db_path)
    assert db["right_punch"].as_tuple() == pytest.approx((5.83, 0.49, 0.51, 0.38), abs=1e-6)
    assert "crouch 2.25 2.11 2.95 3.04" in capsys.readouterr().out


def test_malformed_recording_exits_3(tmp_path):
    rec = tmp_path / "rec"
    rec.mkdir()
    (rec / "x__0.skel.csv").write_text("timestamp,head_x\n0,1\n")
    assert main(["build-motiondb", "--samples", str(rec), "--out", str(tmp_path / "db.json")]) == 3


def test_empty_series_exits_3(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("frame,am_sum,em_sum,bal\n")
    assert main(["analyze", "--series", str(p)]) == 3


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "hpai.cli", "check-config"], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
