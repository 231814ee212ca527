import json
import math

import pytest

from capstab.cli import main
from capstab.geometry import ProfileCurve


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def test_generate_writes_profile(tmp_path):
    code = run(tmp_path, "generate", "--family", "cap", "--n", "2",
               "--theta", str(math.pi / 3), "--grid", "400")
    assert code == 0
    text = (tmp_path / "profile.csv").read_text()
    assert text.splitlines()[0] == "s,x,z,alpha"
    # 17 significant digits: parsing back reproduces the doubles exactly
    prof = ProfileCurve.from_csv(text, axis_start=True)
    assert prof.m == 400
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert meta["metadata"]["theta_lower"] == pytest.approx(math.pi / 3)
    assert (tmp_path / "run_meta.json").exists()


def test_generate_param_family(tmp_path):
    code = run(tmp_path, "generate", "--family", "unduloid", "--n", "2",
               "--param", "0.6:0.8:3", "--grid", "200")
    assert code == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["param"] == "neck"
    assert len(manifest["profiles"]) == 3
    for entry in manifest["profiles"]:
        assert (tmp_path / entry["file"]).exists()


def test_check_identities_formats(tmp_path):
    code = run(tmp_path, "check-identities", "--family", "cylinder", "--n",
               "2", "--radius", "1", "--height", "2.0", "--grid", "300")
    assert code == 0
    assert (tmp_path / "residuals.json").exists()
    assert (tmp_path / "residuals.csv").exists()


def test_format_flag_restricts_outputs(tmp_path):
    code = run(tmp_path, "check-identities", "--family", "cylinder", "--n",
               "2", "--radius", "1", "--height", "2.0", "--grid", "300",
               "--format", "json")
    assert code == 0
    assert (tmp_path / "residuals.json").exists()
    assert not (tmp_path / "residuals.csv").exists()


def test_stability_verdict(tmp_path, capsys):
    code = run(tmp_path, "stability", "--family", "cylinder", "--n", "2",
               "--radius", "1", "--height", "3.5", "--grid", "400")
    assert code == 0
    assert "unstable" in capsys.readouterr().out
    body = json.loads((tmp_path / "stability.json").read_text())
    assert body["stability"]["verdict"] == "unstable"


def test_missing_family_exits_2(tmp_path):
    assert run(tmp_path, "generate") == 2


def test_bad_config_exits_2(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("family = [unclosed")
    assert main(["generate", "--config", str(bad),
                 "--out", str(tmp_path)]) == 2


def test_numerical_failure_exits_3(tmp_path, capsys):
    code = run(tmp_path, "generate", "--family", "nodoid", "--n", "2",
               "--theta", "1.2", "--grid", "300")
    assert code == 3
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "NoMatch"


def test_sweep_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        code = main(["sweep", "--family", "cylinder", "--n", "2", "--radius",
                     "1", "--param", "2.5:3.5:3", "--grid", "300",
                     "--out", str(out)])
        assert code == 0
    assert (a / "sweep.json").read_bytes() == (b / "sweep.json").read_bytes()
    assert (a / "sweep.csv").read_bytes() == (b / "sweep.csv").read_bytes()
    # wall-clock data lives in the sidecar, not in the report
    meta = json.loads((a / "run_meta.json").read_text())
    assert "per_record_seconds" in meta and "timestamp" in meta
    assert "timings" not in json.loads((a / "sweep.json").read_text())


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('[surface]\nfamily = "cylinder"\nn = 2\nradius = 1.0\n'
                   'height = 2.5\n\n[run]\ngrid = 300\n')
    code = main(["stability", "--config", str(cfg), "--out", str(tmp_path)])
    assert code == 0
    body = json.loads((tmp_path / "stability.json").read_text())
    assert body["stability"]["verdict"] == "stable"
    # flag overrides the config value
    code = main(["stability", "--config", str(cfg), "--height", "3.5",
                 "--out", str(tmp_path)])
    assert code == 0
    body = json.loads((tmp_path / "stability.json").read_text())
    assert body["stability"]["verdict"] == "unstable"


def test_report_merges_sweeps(tmp_path, capsys):
    code = main(["sweep", "--family", "cylinder", "--n", "2", "--radius", "1",
                 "--param", "2.5:3.5:3", "--grid", "300", "--out",
                 str(tmp_path)])
    assert code == 0
    code = main(["report", "--out", str(tmp_path)])
    assert code == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["succeeded"] == 3
