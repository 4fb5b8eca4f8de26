"""Command-line front end.

Usage::

    pcfsfwm {dispersion,contour,jsa,purity,design} --config run.json [--out DIR]
            [--format csv|json|both] [--grid N] [--mode analytic|full|both] [--quiet]

The configuration is one JSON document with ``fiber``, ``pump``, ``task`` and
``output`` blocks; see the README for the field list.  All unit conversions
happen once, in :func:`resolve_config`, and every JSON output embeds the
resolved (SI) configuration.

Exit codes: 0 ok, 1 configuration error, 2 numeric failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np
from scipy.constants import c

from pcfsfwm import __version__, design, dispersion, io, jsa, schmidt
from pcfsfwm.dispersion import FiberAxis, FiberSpec
from pcfsfwm.errors import DomainError, NotFoundError, NumericError
from pcfsfwm.phasematch import (
    GVMKind,
    Process,
    PumpSpec,
    gvm_contour,
    solve_sidebands,
    trace_phasematch_contour,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3

CONVENTIONS = ("sigma", "fwhm-intensity")
FORMATS = ("csv", "json", "both")
MODES = ("analytic", "full", "both")
NORMALIZATIONS = ("unit-l2", "peak-1")
CLI_AIR_FILL = (0.1, 0.9)
# Sample range accepted for dispersion dumps (m); the derivative stencil needs
# some room inside the Sellmeier window.
DISPERSION_RANGE = (0.25e-6, 3.5e-6)


class ConfigError(Exception):
    pass


_REQUIRED = object()


def _field(block: dict, name: str, path: str, kind=float, default=_REQUIRED,
           lo=None, hi=None, choices=None, lo_open=False):
    where = f"{path}.{name}"
    if name not in block:
        if default is _REQUIRED:
            raise ConfigError(f"{where}: required field missing")
        return default
    v = block[name]
    if kind is float:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ConfigError(f"{where}: expected a finite number, got {v!r}")
        v = float(v)
    elif kind is int:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{where}: expected an integer, got {v!r}")
    elif kind is str:
        if not isinstance(v, str):
            raise ConfigError(f"{where}: expected a string, got {v!r}")
    elif kind is bool:
        if not isinstance(v, bool):
            raise ConfigError(f"{where}: expected true/false, got {v!r}")
    elif kind is list:
        if not isinstance(v, list):
            raise ConfigError(f"{where}: expected a list, got {v!r}")
    if choices is not None and v not in choices:
        raise ConfigError(f"{where}: {v!r} is not one of {', '.join(map(str, choices))}")
    if lo is not None and (v <= lo if lo_open else v < lo):
        rng = f"{'(' if lo_open else '['}{lo}, {hi if hi is not None else 'inf'}]"
        raise ConfigError(f"{where} = {v} outside valid range {rng}")
    if hi is not None and v > hi:
        raise ConfigError(f"{where} = {v} outside valid range [{lo}, {hi}]")
    return v


def _block(raw: dict, name: str, allowed: set[str], required=True) -> dict:
    if name not in raw:
        if required:
            raise ConfigError(f"{name}: required block missing")
        return {}
    b = raw[name]
    if not isinstance(b, dict):
        raise ConfigError(f"{name}: expected an object")
    unknown = sorted(set(b) - allowed)
    if unknown:
        raise ConfigError(f"{name}.{unknown[0]}: unknown field (allowed: {', '.join(sorted(allowed))})")
    return b


FIBER_KEYS = {"r_um", "d_um", "f", "delta_d_um", "L_m", "L_cm", "gamma_per_W_km"}
PUMP_KEYS = {"process", "lambda_nm", "lambda1_nm", "lambda2_nm", "bandwidth_nm",
             "bandwidth1_nm", "bandwidth2_nm", "convention", "power_W", "power1_W",
             "power2_W"}
OUTPUT_KEYS = {"dir", "format", "normalization"}
TASK_KEYS = {
    "dispersion": {"lambda_min_nm", "lambda_max_nm", "n"},
    "contour": {"pump_min_nm", "pump_max_nm", "n_pumps", "n_scan", "gvm", "delta_d_um_list"},
    "jsa": {"branch", "grid", "mode"},
    "purity": {"branch", "grid", "mode", "filter_s_rad_s", "filter_i_rad_s", "grid_file",
               "convergence"},
    "design": {"kind", "window_nm", "branch", "delta_n_min", "delta_n_max", "steps",
               "reference_nm", "n_pumps"},
}


def bandwidth_to_sigma(bandwidth_nm: float, wavelength_nm: float, convention: str) -> float:
    """Gaussian amplitude half-width sigma (rad/s) from a quoted bandwidth in nm.

    ``sigma``: the quoted width converted to angular frequency is sigma itself.
    ``fwhm-intensity``: the width is the intensity FWHM, equal to
    sigma sqrt(2 ln 2) for the amplitude exp(-nu^2/sigma^2).
    """
    dw = 2 * math.pi * c * bandwidth_nm * 1e-9 / (wavelength_nm * 1e-9) ** 2
    if convention == "sigma":
        return dw
    if convention == "fwhm-intensity":
        return dw / math.sqrt(2 * math.log(2))
    raise ValueError(f"unknown bandwidth convention {convention!r}")


def _resolve_fiber(raw, required=True) -> dict | None:
    if not required and "fiber" not in raw:
        return None
    b = _block(raw, "fiber", FIBER_KEYS)
    if ("r_um" in b) == ("d_um" in b):
        raise ConfigError("fiber.r_um / fiber.d_um: give exactly one of core radius or diameter")
    if "r_um" in b:
        r = _field(b, "r_um", "fiber", lo=0, lo_open=True) * 1e-6
    else:
        r = 0.5 * _field(b, "d_um", "fiber", lo=0, lo_open=True) * 1e-6
    f = _field(b, "f", "fiber", lo=CLI_AIR_FILL[0], hi=CLI_AIR_FILL[1])
    dd = _field(b, "delta_d_um", "fiber", default=0.0) * 1e-6
    if abs(dd) >= 0.2 * r:
        raise ConfigError(f"fiber.delta_d_um = {dd * 1e6} outside valid range |delta_d| < 0.2 r")
    if "L_m" in b and "L_cm" in b:
        raise ConfigError("fiber.L_m / fiber.L_cm: give at most one fiber length")
    if "L_cm" in b:
        L = _field(b, "L_cm", "fiber", lo=0, lo_open=True) * 1e-2
    else:
        L = _field(b, "L_m", "fiber", default=1.0, lo=0, lo_open=True)
    g = _field(b, "gamma_per_W_km", "fiber", default=0.0, lo=0) * 1e-3
    return {"core_radius_m": r, "air_fill": f, "delta_d_m": dd, "length_m": L,
            "gamma_per_W_m": g}


def _resolve_pump(raw, required) -> dict | None:
    if "pump" not in raw:
        if required:
            raise ConfigError("pump: required block missing")
        return None
    b = _block(raw, "pump", PUMP_KEYS)
    proc = _field(b, "process", "pump", str, default=Process.CO_POL_DEGENERATE.value,
                  choices=[p.value for p in Process])
    conv = _field(b, "convention", "pump", str, default="sigma", choices=CONVENTIONS)
    wl_lo, wl_hi = 300.0, 3000.0
    if proc == Process.CO_POL_NONDEGENERATE.value:
        l1 = _field(b, "lambda1_nm", "pump", lo=wl_lo, hi=wl_hi)
        l2 = _field(b, "lambda2_nm", "pump", lo=wl_lo, hi=wl_hi)
        bw1 = _field(b, "bandwidth1_nm", "pump", default=None, lo=0, lo_open=True)
        bw2 = _field(b, "bandwidth2_nm", "pump", default=None, lo=0, lo_open=True)
        p1 = _field(b, "power1_W", "pump", default=0.0, lo=0)
        p2 = _field(b, "power2_W", "pump", default=0.0, lo=0)
        if (bw1 is None) != (bw2 is None):
            raise ConfigError("pump.bandwidth1_nm / pump.bandwidth2_nm: give both or neither")
    else:
        l1 = l2 = _field(b, "lambda_nm", "pump", lo=wl_lo, hi=wl_hi)
        bw1 = bw2 = _field(b, "bandwidth_nm", "pump", default=None, lo=0, lo_open=True)
        p1 = p2 = _field(b, "power_W", "pump", default=0.0, lo=0)
    s1 = None if bw1 is None else bandwidth_to_sigma(bw1, l1, conv)
    s2 = None if bw2 is None else bandwidth_to_sigma(bw2, l2, conv)
    return {"process": proc, "convention": conv, "lambda1_nm": l1, "lambda2_nm": l2,
            "bandwidth1_nm": bw1, "bandwidth2_nm": bw2,
            "omega1": 2 * math.pi * c / (l1 * 1e-9), "omega2": 2 * math.pi * c / (l2 * 1e-9),
            "sigma1": s1, "sigma2": s2, "power1_W": p1, "power2_W": p2}


def _resolve_task(raw, command, overrides) -> dict:
    b = dict(_block(raw, "task", TASK_KEYS[command], required=False))
    if overrides.get("grid") is not None and "grid" in TASK_KEYS[command]:
        b["grid"] = overrides["grid"]
    if overrides.get("mode") is not None and "mode" in TASK_KEYS[command]:
        b["mode"] = overrides["mode"]
    t = {}
    if command == "dispersion":
        lo_nm = DISPERSION_RANGE[0] * 1e9
        hi_nm = DISPERSION_RANGE[1] * 1e9
        t["lambda_min_nm"] = _field(b, "lambda_min_nm", "task", default=500.0, lo=lo_nm, hi=hi_nm)
        t["lambda_max_nm"] = _field(b, "lambda_max_nm", "task", default=1600.0, lo=lo_nm, hi=hi_nm)
        t["n"] = _field(b, "n", "task", int, default=111, lo=1)
        if t["lambda_max_nm"] < t["lambda_min_nm"]:
            raise ConfigError("task.lambda_max_nm: must be >= task.lambda_min_nm")
    elif command == "contour":
        t["pump_min_nm"] = _field(b, "pump_min_nm", "task", default=600.0, lo=250.0, hi=3500.0)
        t["pump_max_nm"] = _field(b, "pump_max_nm", "task", default=1200.0, lo=250.0, hi=3500.0)
        if t["pump_max_nm"] <= t["pump_min_nm"]:
            raise ConfigError("task.pump_max_nm: must be > task.pump_min_nm")
        t["n_pumps"] = _field(b, "n_pumps", "task", int, default=150, lo=2)
        t["n_scan"] = _field(b, "n_scan", "task", int, default=1000, lo=10)
        gvm = _field(b, "gvm", "task", list, default=[])
        kinds = [k.value for k in GVMKind]
        for k, g in enumerate(gvm):
            if g not in kinds:
                raise ConfigError(f"task.gvm[{k}]: {g!r} is not one of {', '.join(kinds)}")
        t["gvm"] = list(gvm)
        dds = _field(b, "delta_d_um_list", "task", list, default=None)
        if dds is not None:
            for k, v in enumerate(dds):
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise ConfigError(f"task.delta_d_um_list[{k}]: expected a number, got {v!r}")
            t["delta_d_um_list"] = [float(v) for v in dds]
    elif command in ("jsa", "purity"):
        t["branch"] = _field(b, "branch", "task", str, default="outer", choices=("outer", "inner"))
        t["grid"] = _field(b, "grid", "task", int, default=512, lo=2)
        t["mode"] = _field(b, "mode", "task", str, default="analytic" if command == "jsa" else "full",
                           choices=MODES)
        if command == "purity":
            fs = _field(b, "filter_s_rad_s", "task", default=None, lo=0, lo_open=True)
            fi = _field(b, "filter_i_rad_s", "task", default=None, lo=0, lo_open=True)
            if (fs is None) != (fi is None):
                raise ConfigError("task.filter_s_rad_s / task.filter_i_rad_s: give both or neither")
            t["filter_s_rad_s"], t["filter_i_rad_s"] = fs, fi
            t["grid_file"] = _field(b, "grid_file", "task", str, default=None)
            t["convergence"] = _field(b, "convergence", "task", bool, default=True)
    elif command == "design":
        t["kind"] = _field(b, "kind", "task", str,
                           choices=("symmetric", "asymmetric", "sweep", "ultrabroadband"))
        win = _field(b, "window_nm", "task", list, default=None)
        if win is not None:
            if (len(win) != 2 or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in win)
                    or not 250 <= min(win) < max(win) <= 3500):
                raise ConfigError("task.window_nm: expected [min_nm, max_nm] within [250, 3500]")
            win = sorted(float(v) for v in win)
        t["window_nm"] = win
        t["branch"] = _field(b, "branch", "task", str, default="outer", choices=("outer", "inner"))
        t["n_pumps"] = _field(b, "n_pumps", "task", int, default=design.DEFAULT_PUMP_POINTS, lo=3)
        if t["kind"] == "sweep":
            t["delta_n_min"] = _field(b, "delta_n_min", "task", default=-6e-5)
            t["delta_n_max"] = _field(b, "delta_n_max", "task", default=6e-5)
            t["steps"] = _field(b, "steps", "task", int, default=13, lo=1)
            t["reference_nm"] = _field(b, "reference_nm", "task", default=800.0, lo=250.0, hi=3500.0)
            if t["delta_n_max"] < t["delta_n_min"]:
                raise ConfigError("task.delta_n_max: must be >= task.delta_n_min")
    return t


def resolve_config(raw, command: str, overrides: dict | None = None) -> dict:
    """Validate a raw config document and convert every quantity to SI once."""
    overrides = overrides or {}
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a JSON object")
    unknown = sorted(set(raw) - {"fiber", "pump", "task", "output"})
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown top-level block")
    out_b = _block(raw, "output", OUTPUT_KEYS, required=False)
    out = {
        "dir": overrides.get("out") or _field(out_b, "dir", "output", str, default="."),
        "format": overrides.get("format") or _field(out_b, "format", "output", str,
                                                    default="both", choices=FORMATS),
        "normalization": _field(out_b, "normalization", "output", str, default="peak-1",
                                choices=NORMALIZATIONS),
    }
    from_file = command == "purity" and "grid_file" in (raw.get("task") or {})
    need_pump = command in ("contour", "jsa", "design") or (command == "purity" and not from_file)
    cfg = {
        "command": command,
        "fiber": _resolve_fiber(raw, required=not from_file),
        "pump": _resolve_pump(raw, need_pump),
        "task": _resolve_task(raw, command, overrides),
        "output": out,
    }
    if command in ("jsa", "purity") and cfg["pump"] is not None and cfg["pump"]["sigma1"] is None \
            and cfg["task"].get("grid_file") is None:
        raise ConfigError("pump.bandwidth_nm: required for jsa/purity")
    return cfg


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from exc


# ---------------------------------------------------------------------------
# Object construction from the resolved config


def make_fiber(cfg: dict, delta_d: float | None = None) -> FiberSpec:
    f = cfg["fiber"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", dispersion.ModelValidityWarning)
        return FiberSpec(core_radius=f["core_radius_m"], air_fill=f["air_fill"],
                         delta_d=f["delta_d_m"] if delta_d is None else delta_d,
                         length=f["length_m"], gamma=f["gamma_per_W_m"])


def make_pump(cfg: dict, placeholder_sigma: float = 1e9) -> PumpSpec:
    p = cfg["pump"]
    s1 = p["sigma1"] if p["sigma1"] is not None else placeholder_sigma
    s2 = p["sigma2"] if p["sigma2"] is not None else placeholder_sigma
    return PumpSpec(p["omega1"], p["omega2"], s1, s2, p["power1_W"], p["power2_W"],
                    Process(p["process"]))


def _embed(cfg: dict) -> dict:
    """Resolved config as embedded in outputs (the output directory is omitted)."""
    out = {k: v for k, v in cfg.items() if k != "output"}
    out["output"] = {k: v for k, v in cfg["output"].items() if k != "dir"}
    out["version"] = __version__
    return out


class Writer:
    def __init__(self, cfg: dict, quiet: bool):
        self.dir = Path(cfg["output"]["dir"])
        self.fmt = cfg["output"]["format"]
        self.quiet = quiet
        self.cfg = cfg
        self.dir.mkdir(parents=True, exist_ok=True)

    @property
    def csv(self) -> bool:
        return self.fmt in ("csv", "both")

    @property
    def json(self) -> bool:
        return self.fmt in ("json", "both")

    def _note(self, path):
        if not self.quiet:
            print(f"wrote {path}")

    def write_csv(self, name, header, rows):
        if self.csv:
            path = self.dir / name
            io.write_csv(path, header, rows)
            self._note(path)

    def write_grid(self, name, grid):
        if self.csv:
            path = self.dir / name
            io.write_grid_csv(path, grid, self.cfg["output"]["normalization"])
            self._note(path)

    def write_json(self, name, payload):
        if self.json:
            path = self.dir / name
            payload = dict(payload)
            payload["config"] = _embed(self.cfg)
            io.write_json(path, payload)
            self._note(path)


# ---------------------------------------------------------------------------
# Commands


def cmd_dispersion(cfg: dict, w: Writer) -> dict:
    t = cfg["task"]
    fib = make_fiber(cfg)
    lam = np.linspace(t["lambda_min_nm"], t["lambda_max_nm"], t["n"]) * 1e-9
    om = dispersion.wavelength_to_omega(lam)
    n_x = np.atleast_1d(dispersion.effective_index(fib, FiberAxis.X, om))
    n_y = np.atleast_1d(dispersion.effective_index(fib, FiberAxis.Y, om))
    k = np.atleast_1d(dispersion.propagation_constant(fib, FiberAxis.X, om))
    ks = [np.atleast_1d(dispersion.derivative(fib, FiberAxis.X, om, q)) for q in (1, 2, 3, 4)]
    header = ("lambda_nm", "omega", "n_eff_x", "k", "k1", "k2", "k3", "k4", "n_eff_y", "delta_n")
    rows = zip(lam * 1e9, om, n_x, k, *ks, n_y, n_y - n_x)
    w.write_csv("dispersion.csv", header, rows)
    zx = dispersion.zero_dispersion_wavelengths(fib, FiberAxis.X)
    zy = dispersion.zero_dispersion_wavelengths(fib, FiberAxis.Y)
    summary = {"zdw_x_nm": [z * 1e9 for z in zx], "zdw_y_nm": [z * 1e9 for z in zy]}
    w.write_json("dispersion.json", summary)
    return summary


CONTOUR_HEADER = ("curve", "branch", "pump_wavelength_nm", "pump_omega", "detuning",
                  "lambda_s_nm", "lambda_i_nm", "theta_si_deg", "trivial")


def _contour_rows(cont, pump: PumpSpec):
    for k in range(len(cont)):
        w1 = cont.pump_omega[k]
        ctr = w1 if pump.is_degenerate else 0.5 * (w1 + pump.omega2)
        d = cont.detuning[k]
        yield (cont.kind, int(cont.branch[k]), 2e9 * math.pi * c / w1, w1, d,
               2e9 * math.pi * c / (ctr + d), 2e9 * math.pi * c / (ctr - d),
               cont.theta_si[k], bool(cont.trivial[k]))


def _empty_contour():
    from pcfsfwm.phasematch import Contour
    e = np.zeros(0)
    return Contour(e, e, e, np.zeros(0, dtype=int), np.zeros(0, dtype=bool))


def cmd_contour(cfg: dict, w: Writer) -> dict:
    t = cfg["task"]
    pump = make_pump(cfg)
    if any(g == GVMKind.GENERALIZED.value for g in t["gvm"]) and cfg["pump"]["sigma1"] is None:
        raise ConfigError("pump.bandwidth1_nm: required for the generalized GVM contour")
    w_hi = 2 * math.pi * c / (t["pump_min_nm"] * 1e-9)
    w_lo = 2 * math.pi * c / (t["pump_max_nm"] * 1e-9)
    step = (w_hi - w_lo) / (t["n_pumps"] - 1)
    dds = t.get("delta_d_um_list")
    variants = [(None, "contour")] if dds is None else [
        (dd * 1e-6, f"contour_{k}") for k, dd in enumerate(dds)]
    summary = {"files": []}
    for dd, stem in variants:
        fib = make_fiber(cfg, dd)
        curves = []
        try:
            curves.append(trace_phasematch_contour(fib, pump, (w_lo, w_hi), step, n_scan=t["n_scan"]))
        except DomainError:
            curves.append(_empty_contour())
        for g in t["gvm"]:
            try:
                curves.append(gvm_contour(fib, pump, (w_lo, w_hi), step, g, n_scan=t["n_scan"]))
            except DomainError:
                pass
        rows = [r for cont in curves for r in _contour_rows(cont, pump)]
        w.write_csv(f"{stem}.csv", CONTOUR_HEADER, rows)
        pm = curves[0]
        info = {
            "delta_d_um": fib.delta_d * 1e6,
            "pump_extent_nm": pm.pump_wavelength_extent() * 1e9,
            "n_points": len(pm),
            "n_nontrivial": int((~pm.trivial).sum()) if len(pm) else 0,
            "n_branches": len(np.unique(pm.branch[~pm.trivial])) if len(pm) else 0,
            "gvm_points": {cont.kind: len(cont) for cont in curves[1:]},
        }
        if dd is not None and fib.delta_d != 0:
            info["delta_n_800nm"] = float(dispersion.birefringence(
                fib, dispersion.wavelength_to_omega(800e-9)))
        summary["files"].append(info)
        w.write_json(f"{stem}.json", info)
    return summary


def _select_point(fib, pump, branch):
    pts = [p for p in solve_sidebands(fib, pump) if not p.trivial]
    if not pts:
        raise NotFoundError("no non-trivial phase-matched sidebands at this pump")
    key = (lambda p: p.detuning)
    return max(pts, key=key) if branch == "outer" else min(pts, key=key)


def _jsa_builders(fib, pump, point):
    return {
        "analytic": lambda g: jsa.jsa_linear(fib, pump, point, g),
        "full": lambda g: jsa.jsa_full(fib, pump, g),
    }


def cmd_jsa(cfg: dict, w: Writer) -> dict:
    t = cfg["task"]
    fib = make_fiber(cfg)
    pump = make_pump(cfg)
    point = _select_point(fib, pump, t["branch"])
    grid = jsa.default_grid(pump, point, t["grid"])
    modes = ["analytic", "full"] if t["mode"] == "both" else [t["mode"]]
    builders = _jsa_builders(fib, pump, point)
    grids = {}
    for m in modes:
        grids[m] = builders[m](grid)
        w.write_grid(f"jsa_{m}.csv", grids[m])
    summary = {
        "point": point.as_dict(),
        "grid": {"center_s": grid.center_s, "center_i": grid.center_i,
                 "half_width_s": grid.half_width_s, "half_width_i": grid.half_width_i,
                 "n_s": grid.n_s, "n_i": grid.n_i},
        "modes": modes,
        "phase_matching": "sinc" if pump.is_degenerate else "complex-erf",
    }
    if not pump.is_degenerate:
        summary["B"] = jsa.nondegenerate_B(pump, point.tau_p)
    if len(grids) == 2:
        summary["rms_difference_peak_fraction"] = jsa.rms_intensity_difference(
            grids["analytic"], grids["full"])
    w.write_json("jsa.json", summary)
    return summary


def _spectrum_rows(label, grid, limit=100):
    lam = schmidt.schmidt_decompose(grid).eigenvalues[:limit]
    for n, v in enumerate(lam):
        yield (label, n, v)


def cmd_purity(cfg: dict, w: Writer) -> dict:
    t = cfg["task"]
    summary = {}
    if t["grid_file"] is not None:
        try:
            g = io.read_grid_csv(Path(t["grid_file"]))
        except ValueError as exc:
            raise ConfigError(f"task.grid_file: {exc}") from exc
        rep = schmidt.report(g.normalized())
        summary["file"] = rep.as_dict()
        w.write_csv("purity.csv", ("grid", "n", "lambda"), _spectrum_rows("file", g.normalized()))
        w.write_json("purity.json", summary)
        return summary

    fib = make_fiber(cfg)
    pump = make_pump(cfg)
    point = _select_point(fib, pump, t["branch"])
    grid = jsa.default_grid(pump, point, t["grid"])
    filters = None
    if t["filter_s_rad_s"] is not None:
        filters = (jsa.FilterSpec(point.omega_s, t["filter_s_rad_s"]),
                   jsa.FilterSpec(point.omega_i, t["filter_i_rad_s"]))
    sets = [None] if filters is None else [None, filters]
    modes = ["analytic", "full"] if t["mode"] == "both" else [t["mode"]]
    builders = _jsa_builders(fib, pump, point)
    summary["point"] = point.as_dict()
    spectra = []
    for m in modes:
        if t["convergence"]:
            reps = schmidt.converged_purities(builders[m], grid, sets)
        else:
            g = builders[m](grid)
            reps = [schmidt.report(g) if f is None else schmidt.filtered_purity(g, *f) for f in sets]
        summary[m] = {"unfiltered": reps[0].as_dict()}
        if filters is not None:
            summary[m]["filtered"] = reps[1].as_dict()
        spectra.extend(_spectrum_rows(m, builders[m](grid)))
    w.write_csv("purity.csv", ("grid", "n", "lambda"), spectra)
    w.write_json("purity.json", summary)
    return summary


DESIGN_HEADER = ("kind", "family", "lambda_p_nm", "lambda_s_nm", "lambda_i_nm", "T_s", "T_i",
                 "theta_si_deg", "sigma")


def _design_row(d: design.DesignPoint):
    p = d.point
    return (d.kind.value, d.family or "", d.wavelength_p * 1e9, d.wavelength_s * 1e9,
            d.wavelength_i * 1e9, p.T_s, p.T_i, p.theta_si, d.sigma)


def cmd_design(cfg: dict, w: Writer) -> dict:
    t = cfg["task"]
    fib = make_fiber(cfg)
    pump = make_pump(cfg)
    win = None
    if t["window_nm"] is not None:
        win = (2 * math.pi * c / (t["window_nm"][1] * 1e-9), 2 * math.pi * c / (t["window_nm"][0] * 1e-9))
    step = None if win is None else (win[1] - win[0]) / (t["n_pumps"] - 1)
    kind = t["kind"]
    if kind == "symmetric":
        d = design.find_symmetric_point(fib, pump, win, step, branch=t["branch"])
        found = [] if d is None else [d]
    elif kind == "asymmetric":
        found = design.find_asymmetric_points(fib, pump, win, step)
    elif kind == "ultrabroadband":
        lam_win = (400e-9, 1800e-9) if t["window_nm"] is None else \
            tuple(v * 1e-9 for v in t["window_nm"])
        d = design.ultra_broadband_point(fib, pump, lam_win)
        found = [] if d is None else [d]
    else:
        dn = np.linspace(t["delta_n_min"], t["delta_n_max"], t["steps"])
        # linspace leaves round-off where the sweep crosses zero
        span = max(abs(t["delta_n_min"]), abs(t["delta_n_max"]))
        dn[np.abs(dn) < 1e-9 * span] = 0.0
        rows, windows = design.birefringence_sweep(fib, dn, t["reference_nm"] * 1e-9, win, step)
        header = ("delta_n", "lambda_p_nm", "lambda_s_nm", "lambda_i_nm", "family")
        w.write_csv("design_sweep.csv", header,
                    [tuple(r.as_row()[h] for h in header) for r in rows])
        summary = {
            "rows": [r.as_row() for r in rows],
            "factorable_windows_nm": [
                {"delta_n": k, "intervals": [[a * 1e9, b * 1e9] for a, b in v]}
                for k, v in windows.items()],
        }
        w.write_json("design_sweep.json", summary)
        return summary
    w.write_csv("design.csv", DESIGN_HEADER, [_design_row(d) for d in found])
    summary = {"found": bool(found), "points": [d.as_dict() for d in found]}
    w.write_json("design.json", summary)
    return summary


COMMANDS = {
    "dispersion": cmd_dispersion,
    "contour": cmd_contour,
    "jsa": cmd_jsa,
    "purity": cmd_purity,
    "design": cmd_design,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pcfsfwm",
                                 description="PCF four-wave-mixing photon-pair design engine")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {
        "dispersion": "effective index, k derivatives, ZDWs, birefringence",
        "contour": "phase-matching and group-velocity-matching contours",
        "jsa": "joint spectral amplitude grids",
        "purity": "Schmidt decomposition and heralded purity",
        "design": "symmetric/asymmetric/sweep/ultra-broadband design search",
    }
    for name, h in helps.items():
        sp = sub.add_parser(name, help=h)
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--out", help="output directory (overrides output.dir)")
        sp.add_argument("--format", choices=FORMATS, help="output format (overrides output.format)")
        sp.add_argument("--grid", type=int, help="grid points per axis (jsa/purity)")
        sp.add_argument("--mode", choices=MODES, help="JSA construction (jsa/purity)")
        sp.add_argument("--quiet", action="store_true", help="suppress progress messages")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = load_config(args.config)
        if args.grid is not None and args.grid < 2:
            raise ConfigError(f"--grid = {args.grid} outside valid range [2, inf]")
        cfg = resolve_config(raw, args.command, {
            "out": args.out, "format": args.format, "grid": args.grid, "mode": args.mode})
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        writer = Writer(cfg, args.quiet)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", dispersion.ModelValidityWarning)
            COMMANDS[args.command](cfg, writer)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NumericError, NotFoundError, ArithmeticError, ValueError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
