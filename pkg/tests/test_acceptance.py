"""Acceptance criteria A1-A8 and P1-P6.

Each test records one PASS/FAIL line (printed in the pytest terminal summary)
before asserting.  Run standalone with ``python3 tests/test_acceptance.py``.
"""

import math
import sys
import time
import warnings
from pathlib import Path

import numpy as np
import pytest
from scipy import special
from scipy.integrate import quad
from scipy.optimize import brentq

from conftest import outer_point, record, sigma_from_nm
from pcfsfwm import cli, design, jsa, schmidt
from pcfsfwm.dispersion import (
    FiberAxis,
    FiberSpec,
    birefringence,
    cladding_index,
    derivative,
    effective_index,
    silica_index,
    wavelength_to_omega,
    zero_dispersion_wavelengths,
)
from pcfsfwm.jsa import FilterSpec, GridSpec, SpectralGrid
from pcfsfwm.phasematch import (
    Process,
    PumpSpec,
    local_sideband,
    phase_mismatch,
    trace_phasematch_contour,
)

X, Y = FiberAxis.X, FiberAxis.Y
NM = 1e-9
CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def check(criterion, ok, detail):
    record(criterion, bool(ok), detail)
    assert ok, f"{criterion}: {detail}"


# --------------------------------------------------------------------------- A


def test_A1_zdw_sym_fiber():
    t0 = time.perf_counter()
    z = zero_dispersion_wavelengths(FiberSpec(core_radius=0.616e-6, air_fill=0.6))
    dt = time.perf_counter() - t0
    ok = (len(z) == 2 and abs(z[0] / NM - 668) <= 15 and abs(z[1] / NM - 1132) <= 15 and dt < 5)
    check("A1", ok, f"ZDWs {[round(float(v) / NM, 2) for v in z]} nm (668/1132 +-15), {dt:.2f} s (<5 s)")


def test_A2_birefringent_fiber(biref_base):
    z = zero_dispersion_wavelengths(biref_base)
    w = wavelength_to_omega(800 * NM)
    parts = [f"ZDWs {[round(float(v) / NM, 1) for v in z]} nm (790/1404 +-15)"]
    ok = len(z) == 2 and abs(z[0] / NM - 790) <= 15 and abs(z[1] / NM - 1404) <= 15
    for dd in (1e-9, -1e-9):
        fib = biref_base.with_(delta_d=dd)
        dn = float(birefringence(fib, w))
        # group-slowness difference between the axes, ps/km
        split = float(derivative(fib, X, w, 1) - derivative(fib, Y, w, 1)) * 1e15
        ok &= abs(abs(dn) - 3e-5) <= 0.3 * 3e-5
        ok &= abs(abs(split) - 0.5) <= 0.3 * 0.5
        parts.append(f"dd={dd * 1e9:+.0f} nm: dn={dn:+.3e} (|3e-5| +-30%), "
                     f"k1x-k1y={split:+.2f} ps/km (|0.5| +-30%)")
    check("A2", ok, "; ".join(parts))


def test_A3_orientation_angle():
    fib = FiberSpec(core_radius=0.67e-6, air_fill=0.52, length=1.0, gamma=0.07)
    pump = PumpSpec.degenerate(wavelength_to_omega(723 * NM), 1e11, power=5.0)
    p = outer_point(fib, pump)
    check("A3", abs(p.theta_si + 55) <= 4, f"theta_si = {p.theta_si:.2f} deg (-55 +-4)")


@pytest.fixture(scope="module")
def sym_design(sym_fiber, sym_pump):
    return design.find_symmetric_point(sym_fiber, sym_pump)


@pytest.fixture(scope="module")
def sym_contour(sym_fiber, sym_pump):
    lo, hi = wavelength_to_omega(1250 * NM), wavelength_to_omega(600 * NM)
    return trace_phasematch_contour(sym_fiber, sym_pump, (lo, hi), (hi - lo) / 149, n_scan=1000)


def test_A4_symmetric_point(sym_design, sym_contour):
    p = sym_design.point
    ext = sym_contour.pump_wavelength_extent() / NM
    ok = (abs(p.wavelength_p / NM - 714.7) <= 5 and abs(p.wavelength_s / NM - 464) <= 20
          and abs(p.wavelength_i / NM - 1551) <= 20 and abs(ext - 453) <= 45.3)
    check("A4", ok, f"pump {p.wavelength_p / NM:.2f} nm (714.7 +-5), sidebands "
          f"{p.wavelength_s / NM:.1f}/{p.wavelength_i / NM:.1f} nm (464/1551 +-20), "
          f"contour extent {ext:.1f} nm (453 +-10%)")


def test_A5_degenerate_purity(sym_fiber, sym_pump, sym_point):
    t0 = time.perf_counter()
    g = jsa.default_grid(sym_pump, sym_point, 512)
    full = jsa.jsa_full(sym_fiber, sym_pump, g)
    pur = schmidt.purity(full)
    fs = FilterSpec(sym_point.omega_s, 9.35e11)
    fi = FilterSpec(sym_point.omega_i, 9.35e11)
    filt = schmidt.filtered_purity(full, fs, fi)
    dt = time.perf_counter() - t0
    reps = schmidt.converged_purities(lambda s: jsa.jsa_full(sym_fiber, sym_pump, s), g,
                                      (None, (fs, fi)), max_doublings=1)
    delta = max(r.convergence_delta for r in reps)
    ok = (abs(pur - 0.901) <= 0.03 and abs(filt.purity - 0.981) <= 0.012
          and 1 - filt.flux_fraction <= 0.07 and delta < 1e-3 and dt < 120)
    check("A5", ok, f"purity {pur:.4f} (0.901 +-0.03), filtered {filt.purity:.4f} "
          f"(0.981 +-0.012), flux loss {1 - filt.flux_fraction:.3f} (<=0.07), "
          f"doubling delta {delta:.1e} (<1e-3), {dt:.1f} s at 512^2 (<120 s)")


def test_A6_nondegenerate(nd_fiber, nd_pump, nd_point, nd_grids):
    p = nd_point
    B = jsa.nondegenerate_B(nd_pump, p.tau_p)
    _, full = nd_grids
    pur = schmidt.purity(full)
    filt = schmidt.filtered_purity(full, FilterSpec(p.omega_s, 12.90e12), FilterSpec(p.omega_i, 12.90e12))
    ok = (abs(p.wavelength_s / NM - 736) <= 15 and abs(p.wavelength_i / NM - 960) <= 15
          and abs(B - 1.73) <= 0.173 and abs(pur - 0.89) <= 0.03
          and abs(filt.purity - 0.98) <= 0.012 and 1 - filt.flux_fraction <= 0.08)
    check("A6", ok, f"sidebands {p.wavelength_s / NM:.1f}/{p.wavelength_i / NM:.1f} nm (736/960 +-15), "
          f"B {B:.3f} (1.73 +-10%), purity {pur:.4f} (0.89 +-0.03), filtered {filt.purity:.4f} "
          f"(0.98 +-0.012), flux loss {1 - filt.flux_fraction:.3f} (<=0.08)")


def _asymmetric_purity(fib, d):
    pump = PumpSpec.degenerate(d.point.omega1, sigma_from_nm(0.30, d.wavelength_p / NM), 0.0,
                               Process.CROSS_POL_DEGENERATE)
    g = jsa.default_grid(pump, d.point, 256)
    return schmidt.converged_purity(lambda s: jsa.jsa_full(fib, pump, s), g).purity


def test_A7_asymmetric_points(biref_base):
    xp = PumpSpec.degenerate(wavelength_to_omega(800 * NM), 1e9, 0.0, Process.CROSS_POL_DEGENERATE)
    found = {}
    for dd in (1e-9, -1e-9):
        fib = biref_base.with_(delta_d=dd)
        for d in design.find_asymmetric_points(fib, xp):
            if d.family in ("D", "F") and d.family not in found:
                found[d.family] = (fib, d)
    parts, ok = [], True
    for fam, ls, li, pur_ref in (("D", 746.4, 949.0, 0.993), ("F", 677.1, 834.2, 0.988)):
        if fam not in found:
            ok = False
            parts.append(f"{fam} not found")
            continue
        fib, d = found[fam]
        pur = _asymmetric_purity(fib, d)
        ok &= (abs(d.wavelength_s / NM - ls) <= 12 and abs(d.wavelength_i / NM - li) <= 12
               and abs(pur - pur_ref) <= 0.012)
        parts.append(f"{fam} (dd={fib.delta_d * 1e9:+.0f} nm): {d.wavelength_s / NM:.1f}/"
                     f"{d.wavelength_i / NM:.1f} nm ({ls}/{li} +-12), purity {pur:.4f} "
                     f"({pur_ref} +-0.012)")
    check("A7", ok, "; ".join(parts))


def test_A8_ultra_broadband(sym_fiber, sym_pump):
    d = design.ultra_broadband_point(sym_fiber, sym_pump)
    w, bw = d.extra["pump_omega"], d.extra["bandwidth"]
    ok = abs(w / 2.82e15 - 1) <= 0.02 and 0.5 <= bw / 2e15 <= 2
    check("A8", ok, f"pump {w:.4e} rad/s (2.82e15 +-2%), contour-extent bandwidth {bw:.3e} rad/s "
          f"(2e15 within x2)")


# --------------------------------------------------------------------------- P


def _phi_oracle(B, x):
    re = quad(lambda t: math.cos(x * t) * math.exp(-t * t / (4 * B * B)), 0, 1,
              epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    im = quad(lambda t: math.sin(x * t) * math.exp(-t * t / (4 * B * B)), 0, 1,
              epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    norm = quad(lambda t: math.exp(-t * t / (4 * B * B)), 0, 1, epsabs=1e-14, epsrel=1e-12)[0]
    return complex(re, im) / norm


def test_P1_analytic_vs_numeric(sym_grids, nd_grids):
    rms3 = jsa.rms_intensity_difference(*sym_grids)
    rms4 = jsa.rms_intensity_difference(*nd_grids)
    err = 0.0
    xs = np.linspace(-20, 20, 161)
    for B in (0.1, 1.0, 1.73, 10.0):
        got = jsa.pm_nondegenerate(B, xs)
        ref = np.array([_phi_oracle(B, x) for x in xs])
        err = max(err, float(np.max(np.abs(got - ref) / np.abs(ref))))
    ok = rms3 < 0.02 and rms4 < 0.02 and err < 1e-6
    check("P1", ok, f"RMS A5 {rms3:.1e}, A6 {rms4:.1e} (<2% of peak); Phi max rel err {err:.1e} (<1e-6)")


def test_P2_schmidt(rng):
    spec = GridSpec(0.0, 0.0, 1.0, 1.0, 256, 256)
    u = rng.normal(size=256) + 1j * rng.normal(size=256)
    v = rng.normal(size=256) + 1j * rng.normal(size=256)
    r1 = abs(schmidt.purity(SpectralGrid(spec, np.outer(u, v))) - 1)
    S, I = np.meshgrid(spec.omega_s, spec.omega_i, indexing="ij")
    gerr = 0.0
    for sp, sm in ((0.05, 0.1), (0.03, 0.12), (0.1, 0.02)):
        amp = np.exp(-((S + I) ** 2) / (4 * sp**2) - ((S - I) ** 2) / (4 * sm**2))
        gerr = max(gerr, abs(schmidt.purity(SpectralGrid(spec, amp)) - 2 * sp * sm / (sp**2 + sm**2)))
    spec2 = GridSpec(0.0, 1.0, 1.0, 2.0, 40, 70)
    g = SpectralGrid(spec2, rng.normal(size=(40, 70)) + 1j * rng.normal(size=(40, 70)))
    a = schmidt.schmidt_decompose(g).eigenvalues
    b = schmidt.schmidt_decompose(g.transposed()).eigenvalues
    terr = float(np.max(np.abs(a - b)))
    ok = r1 <= 1e-10 and gerr <= 1e-4 and terr <= 1e-14
    check("P2", ok, f"rank-one |1-purity| {r1:.1e} (<=1e-10), Gaussian oracle err {gerr:.1e} "
          f"(<=1e-4), transpose eigenvalue diff {terr:.1e}")


def _lp01(radius, n1, n2, lam):
    k0 = 2 * math.pi / lam
    V = k0 * radius * math.sqrt(n1**2 - n2**2)

    def f(u):
        w = math.sqrt(V * V - u * u)
        return u * special.j1(u) / special.j0(u) - w * special.k1(w) / special.k0(w)

    u = brentq(f, 1e-9, min(V, 2.404825557695773) * (1 - 1e-12), xtol=1e-15)
    return math.sqrt(n1**2 - (u / (k0 * radius)) ** 2)


def test_P3_dispersion_self_consistency():
    fib = FiberSpec(core_radius=0.616e-6, air_fill=0.6)
    worst = 0.0
    for lam in (0.8e-6, 1.0e-6, 1.3e-6, 1.6e-6):
        w = wavelength_to_omega(lam)
        for order in (1, 2, 3, 4):
            a = derivative(fib, X, w, order)
            b = derivative(fib, X, w, order, step_scale=0.5)
            scale = abs(derivative(fib, X, wavelength_to_omega(1.0e-6), order))
            worst = max(worst, abs(a - b) / max(abs(a), scale))
    lp = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for r in (1e-6, 2e-6):
            weak = FiberSpec(core_radius=r, air_fill=0.01)
            for lam in (0.8e-6, 1.0e-6, 1.2e-6, 1.6e-6):
                w = wavelength_to_omega(lam)
                ref = _lp01(r, silica_index(w), cladding_index(w, 0.01), lam)
                lp = max(lp, abs(effective_index(weak, X, w) - ref))
    check("P3", worst <= 1e-5 and lp <= 1e-5,
          f"step-halving rel diff {worst:.1e} (<=1e-5), LP01 |dn| {lp:.1e} (<=1e-5, f=0.01)")


def test_P4_crosspol_copol(biref_base, rng):
    wp = wavelength_to_omega(rng.uniform(0.7e-6, 1.3e-6, 100))
    det = rng.uniform(0.0, 0.3, 100) * wp
    worst = 0.0
    for w, d in zip(wp, det):
        co = PumpSpec.degenerate(w, 1e11, 0.0, Process.CO_POL_DEGENERATE)
        cr = PumpSpec.degenerate(w, 1e11, 0.0, Process.CROSS_POL_DEGENERATE)
        worst = max(worst, abs(phase_mismatch(biref_base, co, w + d, w - d)
                               - phase_mismatch(biref_base, cr, w + d, w - d)))
    check("P4", worst <= 1e-12, f"max |dk_cross - dk_co| {worst:.1e} rad/m (<=1e-12) over 100 samples")


def test_P5_contour_geometry(sym_fiber, sym_pump, sym_contour):
    cont = sym_contour.nontrivial()
    idx = np.arange(len(cont))[:: max(1, len(cont) // 40)]
    worst, n, skipped = 0.0, 0, 0
    for j in idx:
        w1, d, th = float(cont.pump_omega[j]), float(cont.detuning[j]), float(cont.theta_si[j])
        h = 2e-6 * w1
        hw = 2e-3 * max(d, 1e12)
        pa = local_sideband(sym_fiber, sym_pump.with_pump1(w1 - h), d, hw)
        pb = local_sideband(sym_fiber, sym_pump.with_pump1(w1 + h), d, hw)
        if pa is None or pb is None or pa.trivial or pb.trivial:
            skipped += 1  # tangent undefined at a loop tip
            continue
        tangent = math.degrees(math.atan((pb.detuning - pa.detuning) / (2 * h)))
        diff = (tangent - (45.0 - th) + 90.0) % 180.0 - 90.0
        worst = max(worst, abs(diff))
        n += 1
    check("P5", n >= 20 and worst <= 3.0,
          f"max |atan(dDelta/dwp) - (45 - theta_si)| {worst:.2e} deg (<=3) at {n} points "
          f"({skipped} loop-tip points without a two-sided tangent)")


COMMANDS = {"sym_dispersion.json": "dispersion", "sym_contour.json": "contour",
            "sym_design.json": "design"}


def test_P6_cli_determinism(tmp_path):
    ok, detail = True, []
    for name in COMMANDS:
        outs = []
        for k in range(2):
            out = tmp_path / f"{name}_{k}"
            code = cli.main([COMMANDS[name], "--config", str(CONFIGS / name),
                             "--out", str(out), "--quiet"])
            ok &= code == 0
            outs.append(out)
        files = sorted(p.name for p in outs[0].iterdir())
        same = files and all((outs[0] / f).read_bytes() == (outs[1] / f).read_bytes() for f in files)
        ok &= bool(same)
        detail.append(f"{name}: {len(files)} files {'identical' if same else 'DIFFER'}")
    check("P6", ok, "; ".join(detail))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
