import csv
import json

import numpy as np
import pytest

from pcfsfwm import cli, io
from pcfsfwm.jsa import GridSpec, SpectralGrid

SYM_FIBER = {"r_um": 0.616, "f": 0.6, "L_m": 0.25, "gamma_per_W_km": 70}
SYM_PUMP = {"lambda_nm": 714.7, "bandwidth_nm": 0.1, "convention": "sigma", "power_W": 30}


def run(tmp_path, command, cfg, *extra, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    out = tmp_path / f"out_{command}_{name}"
    code = cli.main([command, "--config", str(path), "--out", str(out), "--quiet", *extra])
    return code, out


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_invalid_fill_fraction_exit_code(tmp_path, capsys):
    cfg = {"fiber": dict(SYM_FIBER, f=1.5), "task": {}}
    code, _ = run(tmp_path, "dispersion", cfg)
    assert code == 1
    err = capsys.readouterr().err
    assert "fiber.f" in err and "0.1" in err and "0.9" in err


def test_unknown_field_and_bad_json(tmp_path, capsys):
    code, _ = run(tmp_path, "dispersion", {"fiber": dict(SYM_FIBER, radius=1)})
    assert code == 1
    assert "fiber.radius" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text('{"fiber": {"r_um": 0.6,,}}')
    assert cli.main(["dispersion", "--config", str(bad), "--quiet"]) == 1
    assert "bad.json:1:" in capsys.readouterr().err


def test_task_field_of_other_command_rejected(tmp_path, capsys):
    cfg = {"fiber": SYM_FIBER, "task": {"grid": 64}}
    code, _ = run(tmp_path, "dispersion", cfg)
    assert code == 1
    assert "task.grid" in capsys.readouterr().err


def test_dispersion_outputs(tmp_path):
    cfg = {"fiber": SYM_FIBER, "task": {"lambda_min_nm": 600, "lambda_max_nm": 1200, "n": 7}}
    code, out = run(tmp_path, "dispersion", cfg)
    assert code == 0
    rows = read_csv(out / "dispersion.csv")
    assert len(rows) == 7
    assert all(float(r["delta_n"]) == 0.0 for r in rows)
    summary = json.loads((out / "dispersion.json").read_text())
    zx = summary["zdw_x_nm"]
    assert zx[0] == pytest.approx(668, abs=15) and zx[1] == pytest.approx(1132, abs=15)
    # provenance: resolved config in SI units
    assert summary["config"]["fiber"]["core_radius_m"] == pytest.approx(0.616e-6)
    raw = (out / "dispersion.csv").read_bytes()
    assert b"\r\n" not in raw


def test_empty_contour_window(tmp_path):
    cfg = {"fiber": SYM_FIBER, "pump": SYM_PUMP,
           "task": {"pump_min_nm": 1600, "pump_max_nm": 1700, "n_pumps": 3, "n_scan": 100}}
    code, out = run(tmp_path, "contour", cfg)
    assert code == 0
    lines = (out / "contour.csv").read_text().splitlines()
    assert len(lines) == 1 and lines[0].startswith("curve,")


def test_jsa_tiny_grid(tmp_path):
    cfg = {"fiber": SYM_FIBER, "pump": SYM_PUMP, "task": {"grid": 2, "mode": "analytic"}}
    code, out = run(tmp_path, "jsa", cfg)
    assert code == 0
    rows = read_csv(out / "jsa_analytic.csv")
    assert len(rows) == 4
    assert max(float(r["abs2"]) for r in rows) == pytest.approx(1.0)


def test_grid_flag_rejects_one(tmp_path):
    cfg = {"fiber": SYM_FIBER, "pump": SYM_PUMP, "task": {"mode": "analytic"}}
    code, _ = run(tmp_path, "jsa", cfg, "--grid", "1")
    assert code == 1


def test_nondegenerate_analytic_records_B(tmp_path):
    cfg = {"fiber": {"r_um": 0.601, "f": 0.522, "L_cm": 25},
           "pump": {"process": "copol-nondegenerate", "lambda1_nm": 625, "lambda2_nm": 1250,
                    "bandwidth1_nm": 1.51, "bandwidth2_nm": 0.12, "power_W": 0},
           "task": {"grid": 32, "mode": "analytic"}}
    code, out = run(tmp_path, "jsa", cfg)
    assert code == 0
    summary = json.loads((out / "jsa.json").read_text())
    assert summary["B"] == pytest.approx(1.73, rel=0.1)


def test_purity_from_outer_product_grid_file(tmp_path, rng):
    spec = GridSpec(2e15, 3e15, 1e12, 2e12, 24, 31)
    amp = np.outer(rng.normal(size=24) + 1j * rng.normal(size=24), np.exp(-np.linspace(-2, 2, 31) ** 2))
    path = tmp_path / "grid.csv"
    io.write_grid_csv(path, SpectralGrid(spec, amp), "unit-l2")
    cfg = {"task": {"grid_file": str(path)}}
    code, out = run(tmp_path, "purity", cfg)
    assert code == 0
    summary = json.loads((out / "purity.json").read_text())
    assert summary["file"]["purity"] == pytest.approx(1.0, abs=1e-10)


def test_missing_grid_file_is_io_error(tmp_path):
    code, _ = run(tmp_path, "purity", {"task": {"grid_file": str(tmp_path / "nope.csv")}})
    assert code == 3


def test_unwritable_output_is_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cfg_path = tmp_path / "c.json"
    cfg_path.write_text(json.dumps({"fiber": SYM_FIBER, "task": {"n": 3}}))
    code = cli.main(["dispersion", "--config", str(cfg_path), "--out", str(blocker / "sub"), "--quiet"])
    assert code == 3


def test_bandwidth_conventions():
    s = cli.bandwidth_to_sigma(0.1, 714.7, "sigma")
    f = cli.bandwidth_to_sigma(0.1, 714.7, "fwhm-intensity")
    assert f == pytest.approx(s / np.sqrt(2 * np.log(2)), rel=1e-14)
    with pytest.raises(ValueError):
        cli.bandwidth_to_sigma(0.1, 714.7, "hwhm")


def test_flags_override_config(tmp_path):
    cfg = {"fiber": SYM_FIBER, "pump": SYM_PUMP, "task": {"grid": 64, "mode": "full"},
           "output": {"format": "both"}}
    code, out = run(tmp_path, "jsa", cfg, "--grid", "4", "--mode", "analytic", "--format", "json")
    assert code == 0
    assert not (out / "jsa_analytic.csv").exists()
    summary = json.loads((out / "jsa.json").read_text())
    assert summary["grid"]["n_s"] == 4


@pytest.mark.parametrize("command, cfg", [
    ("dispersion", {"fiber": SYM_FIBER, "task": {"n": 21}}),
    ("contour", {"fiber": SYM_FIBER, "pump": SYM_PUMP,
                 "task": {"pump_min_nm": 700, "pump_max_nm": 730, "n_pumps": 4, "n_scan": 200}}),
    ("jsa", {"fiber": SYM_FIBER, "pump": SYM_PUMP, "task": {"grid": 16, "mode": "both"}}),
])
def test_repeated_runs_are_byte_identical(tmp_path, command, cfg):
    _, a = run(tmp_path, command, cfg, name="a.json")
    _, b = run(tmp_path, command, cfg, name="b.json")
    files = sorted(p.name for p in a.iterdir())
    assert files == sorted(p.name for p in b.iterdir()) and files
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes()
