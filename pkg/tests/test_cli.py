import json
import math
import subprocess
import sys

import numpy as np
import pytest

from chirp_af.cli import main
from chirp_af.scenario import ScenarioError, load_scenario, scenario_from_dict


@pytest.fixture
def ca_file(tmp_path):
    p = tmp_path / "ca.json"
    p.write_text(json.dumps({"curve": {"kind": "circular", "R_ca": 1000, "psi": math.pi}, "source": [0, 0], "N": 256}))
    return p


@pytest.fixture
def ula_file(tmp_path):
    p = tmp_path / "ula.json"
    p.write_text(json.dumps({"curve": {"kind": "ula", "L": 500}, "source": {"R": 1000, "theta": math.pi / 2}, "N": 32}))
    return p


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_af_grid_outputs(tmp_path, ca_file):
    out = tmp_path / "grid" / "af"
    code = main(["af-grid", "--scenario", str(ca_file), "--out", str(out), "--format", "both",
                 "--x-range", "-2", "2", "--nx", "5", "--y-range", "-1", "1", "--ny", "3"])
    assert code == 0
    rows = np.genfromtxt(f"{out}.csv", delimiter=",", names=True)
    assert rows.dtype.names == ("x", "y", "re", "im", "abs", "abs_sqrt", "abs_norm")
    assert rows.size == 15
    f32 = np.fromfile(f"{out}.f32", dtype="<f4")
    assert f32.size == 15
    assert np.allclose(f32, rows["abs"], rtol=1e-6)
    meta = json.loads((tmp_path / "grid" / "af.meta.json").read_text())
    assert meta["shape"] == [5, 3] and meta["N"] == 256
    centre = rows[(rows["x"] == 0) & (rows["y"] == 0)]
    assert centre["abs_norm"][0] == pytest.approx(1.0, rel=1e-12)
    manifest = json.loads((tmp_path / "grid" / "af.manifest.json").read_text())
    assert manifest["command"] == "af-grid"
    assert set(manifest["outputs"]) == {"af.csv", "af.f32", "af.meta.json"}
    assert len(manifest["scenario_hash"]) == 16
    for key in ("tool_version", "parameters", "seed", "wall_time_s"):
        assert key in manifest


def test_af_grid_is_deterministic_across_threads(tmp_path, ula_file):
    common = ["af-grid", "--scenario", str(ula_file), "--x-range", "-50", "50", "--nx", "9",
              "--y-range", "950", "1050", "--ny", "7"]
    assert main(common + ["--out", str(tmp_path / "a"), "--threads", "1"]) == 0
    assert main(common + ["--out", str(tmp_path / "b"), "--threads", "3"]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_af_grid_polar_continuous(tmp_path, ca_file):
    out = tmp_path / "polar"
    code = main(["af-grid", "--scenario", str(ca_file), "--out", str(out), "--axes", "polar", "--continuous",
                 "--r-range", "0", "1", "--nr", "3", "--theta-range", "0", "1", "--ntheta", "2", "--center-on-source"])
    assert code == 0
    rows = np.genfromtxt(f"{out}.csv", delimiter=",", names=True)
    assert rows.dtype.names[:2] == ("R", "theta")
    meta = json.loads((tmp_path / "polar.meta.json").read_text())
    assert meta["mode"] == "continuous" and meta["center"] == [0.0, 0.0]


def test_scenario_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"curve": {"kind": "hexagon"}, "source": [0, 0]}))
    assert main(["af-grid", "--scenario", str(bad)]) == 2
    assert main(["af-grid", "--scenario", str(tmp_path / "missing.json")]) == 2
    assert main(["af-grid"]) == 2
    assert "scenario error" in capsys.readouterr().err


def test_all_singular_grid_exits_3(tmp_path, capsys):
    p = tmp_path / "tiny.json"
    p.write_text(json.dumps({"curve": {"kind": "ula", "L": 10}, "source": [0, 3], "N": 10}))
    code = main(["af-grid", "--scenario", str(p), "--x-range", "-4.5", "-4.5", "--nx", "1",
                 "--y-range", "0", "0", "--ny", "1"])
    assert code == 3
    assert "numerical failure" in capsys.readouterr().err


def test_spectrum_command(tmp_path, capsys, ca_file):
    out = tmp_path / "spec"
    code = main(["spectrum", "--scenario", str(ca_file), "--target", "0", "-2", "--M", "257",
                 "--k-max", "60", "--out", str(out)])
    assert code == 0
    summary = json.loads((tmp_path / "spec.json").read_text())
    assert summary["K_chirp"] == pytest.approx(4 * math.pi, rel=1e-3)
    assert summary["no_alias"]["N"] == 256 and summary["no_alias"]["no_alias_chirp"] is True
    rows = np.genfromtxt(f"{out}.csv", delimiter=",", names=True)
    assert rows.size == 257 and rows["k_tau"][128] == 0.0


def test_spectrum_reports_range_warning(capsys, ca_file):
    code, summary = run_json(capsys, ["spectrum", "--scenario", str(ca_file), "--target", "0", "-5",
                                      "--M", "65", "--k-max", "5"])
    assert code == 0
    assert summary["K_measured"] is None and "warning" in summary


def test_bandlimit_command(capsys, ula_file):
    code, out = run_json(capsys, ["bandlimit", "--scenario", str(ula_file), "--target-polar", "20000", "1.5707963267948966"])
    assert code == 0
    assert set(out) == {"K_chirp", "K_ula"}


def test_ula_analyze(capsys, ula_file):
    code, out = run_json(capsys, ["ula-analyze", "--scenario", str(ula_file), "--target", "0", "800"])
    assert code == 0
    assert out["radial_bounds"][0] == pytest.approx(796.178, abs=1e-3)
    assert out["radial_bounds"][1] == pytest.approx(1344.086, abs=1e-3)
    assert out["aliasing"] is False
    code, out = run_json(capsys, ["ula-analyze", "--scenario", str(ula_file), "--target", "0", "790"])
    assert out["aliasing"] is True


def test_ula_analyze_rejects_circle(capsys, ca_file):
    assert main(["ula-analyze", "--scenario", str(ca_file), "--target", "0", "1"]) == 2


def test_ca_analyze(capsys, ca_file):
    code, out = run_json(capsys, ["ca-analyze", "--scenario", str(ca_file), "--theta", "0.3",
                                  "--window", "100", "--ray", "0", "1", "3"])
    assert code == 0
    assert out["Omega"] == 1.0
    assert out["R_max"] == pytest.approx(128 / math.pi)
    assert out["multiples"] == pytest.approx([128 / math.pi, 256 / math.pi])
    ray = out["series_along_ray"]
    assert ray["continuous_re"][0] == pytest.approx(1.0)
    assert ray["discrete_re"][0] == pytest.approx(1.0)


def test_alias_locus_both_geometries(tmp_path, ca_file, ula_file):
    assert main(["alias-locus", "--scenario", str(ca_file), "--samples", "61", "--out", str(tmp_path / "ca")]) == 0
    lines = (tmp_path / "ca.csv").read_text().splitlines()
    assert lines[0] == "branch,segment,x,y"
    fronts = {line.split(",")[0] for line in lines[1:]}
    assert fronts == {"front_m1", "front_m2"}
    assert main(["alias-locus", "--scenario", str(ula_file), "--samples", "61", "--out", str(tmp_path / "ula")]) == 0
    branches = {line.split(",")[0] for line in (tmp_path / "ula.csv").read_text().splitlines()[1:]}
    assert branches == {"inner", "outer"}


def test_validate_quick_subset(capsys):
    code = main(["validate", "--quick", "--only", "1", "5", "8"])
    captured = capsys.readouterr()
    report = json.loads(captured.out)
    assert code == 0 and report["all_passed"]
    assert [c["id"] for c in report["criteria"]] == [1, 5, 8]
    assert captured.err.count("[PASS]") == 3


def test_wavelength_scale(tmp_path):
    raw = {"curve": {"kind": "ula", "L": 5.0}, "source": [0.0, 10.0], "N": 32}
    sc = scenario_from_dict(raw, wavelength_scale=0.01)
    assert sc.curve.L == pytest.approx(500.0)
    assert sc.source.y == pytest.approx(1000.0)
    assert sc.k_s == pytest.approx(2 * math.pi)
    metric = scenario_from_dict({**raw, "k_s": 2 * math.pi / 0.01}, wavelength_scale=0.01)
    assert metric.k_s == pytest.approx(2 * math.pi)
    with pytest.raises(ScenarioError):
        scenario_from_dict({**raw, "N": 2.5})
    with pytest.raises(ScenarioError):
        scenario_from_dict({"curve": {"kind": "ula", "L": 5.0}})
    p = tmp_path / "list.json"
    p.write_text("[1, 2]")
    with pytest.raises(ScenarioError):
        load_scenario(p)


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "chirp_af.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "0.1.0" in res.stdout
