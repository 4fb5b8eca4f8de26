"""Design searches: factorable operating points, birefringence sweeps, broadband regime.

All searches share one procedure: trace the Delta k = 0 contour on a coarse
pump grid, evaluate a signed condition along each branch, then refine every
sign change by root finding in pump frequency while following the branch
with a local phase-matching solve.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.constants import c
from scipy.optimize import brentq

from pcfsfwm import dispersion
from pcfsfwm.dispersion import FiberAxis, FiberSpec
from pcfsfwm.errors import DomainError, NotFoundError
from pcfsfwm.phasematch import (
    PhaseMatchPoint,
    Process,
    PumpSpec,
    gvm_coefficients,
    local_sideband,
    orientation_angle,
    phase_mismatch,
    solve_sidebands,
    trace_phasematch_contour,
)

# Constant of the Gaussian approximation to sinc used in the bandwidth-matching
# condition 2 Gamma sigma^2 |T_s T_i| = 1.
GAMMA = 0.193

SYMMETRIC_TOL = 0.01
DEFAULT_PUMP_POINTS = 60
# Asymmetric points also occur outside the ZDW band, so that search looks wider.
ASYMMETRIC_PAD = 0.2


class DesignKind(enum.Enum):
    SYMMETRIC = "SymmetricFactorable"
    ASYMMETRIC_S = "AsymmetricFactorableS"
    ASYMMETRIC_I = "AsymmetricFactorableI"
    ULTRA_BROADBAND = "UltraBroadband"


@dataclass(frozen=True)
class DesignPoint:
    """An operating point returned by a design search.

    ``sigma`` is the matched pump bandwidth (symmetric designs only).
    Asymmetric designs carry ``bandwidth_condition`` instead: the pump
    bandwidth must satisfy ``sigma >> 1/|T|`` for the non-vanishing ``T``.
    """

    point: PhaseMatchPoint
    kind: DesignKind
    sigma: float | None = None
    bandwidth_condition: str | None = None
    family: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def wavelength_s(self) -> float:
        return self.point.wavelength_s

    @property
    def wavelength_i(self) -> float:
        return self.point.wavelength_i

    @property
    def wavelength_p(self) -> float:
        return self.point.wavelength_p

    def condition_residual(self) -> float:
        """Relative residual of the kind-specific group-velocity condition."""
        p = self.point
        scale = abs(p.T_s) + abs(p.T_i)
        if self.kind is DesignKind.SYMMETRIC:
            return abs(p.T_s + p.T_i) / (0.5 * scale)
        if self.kind is DesignKind.ASYMMETRIC_S:
            return abs(p.T_s) / scale
        if self.kind is DesignKind.ASYMMETRIC_I:
            return abs(p.T_i) / scale
        return 0.0

    def as_dict(self) -> dict:
        d = {
            "kind": self.kind.value,
            "family": self.family,
            "sigma": self.sigma,
            "bandwidth_condition": self.bandwidth_condition,
            "lambda_p_nm": self.wavelength_p * 1e9,
            "lambda_s_nm": self.wavelength_s * 1e9,
            "lambda_i_nm": self.wavelength_i * 1e9,
            "point": self.point.as_dict(),
        }
        d.update(self.extra)
        return d


def factorable_possible(T_s: float, T_i: float) -> bool:
    """True iff T_s T_i <= 0 (exact sign test, no tolerance)."""
    if not (math.isfinite(T_s) and math.isfinite(T_i)):
        raise ValueError("GVM coefficients must be finite")
    return T_s * T_i <= 0


def symmetric_bandwidth(T_s: float, T_i: float, gamma: float = GAMMA) -> float:
    """Pump bandwidth sigma (rad/s) solving 2 Gamma sigma^2 |T_s T_i| = 1."""
    prod = abs(T_s * T_i)
    if prod == 0:
        raise ValueError(
            "T_s T_i = 0: no matched bandwidth exists; use an asymmetric design "
            "(find_asymmetric_points) instead"
        )
    return 1.0 / math.sqrt(2.0 * gamma * prod)


# ---------------------------------------------------------------------------
# Branch search machinery


def _residual(kind: DesignKind, ts: float, ti: float) -> float:
    if kind is DesignKind.SYMMETRIC:
        return ts + ti
    if kind is DesignKind.ASYMMETRIC_S:
        return ts
    return ti


def _default_step(window, n=DEFAULT_PUMP_POINTS):
    lo, hi = sorted(window)
    return (hi - lo) / (n - 1)


def _branch_samples(fiber, pump, window, step, n_scan):
    """Non-trivial contour points grouped by branch, with T_s, T_i attached."""
    cont = trace_phasematch_contour(fiber, pump, window, step, n_scan=n_scan).nontrivial()
    out = []
    for b in np.unique(cont.branch):
        sel = np.nonzero(cont.branch == b)[0]
        sel = sel[np.argsort(cont.pump_omega[sel])]
        rows = []
        for j in sel:
            w1, d = float(cont.pump_omega[j]), float(cont.detuning[j])
            pj = pump.with_pump1(w1)
            ts, ti, _ = gvm_coefficients(fiber, pj, pj.center + d, pj.center - d)
            rows.append((w1, d, ts, ti))
        out.append(rows)
    return out


def _follow(fiber, pump, w1, guess, half_width):
    return local_sideband(fiber, pump.with_pump1(w1), guess, half_width)


def _refine_crossing(fiber, pump, kind, a, b):
    """Root of the condition residual between contour samples a and b."""
    (wa, da, *_), (wb, db, *_) = a, b
    hw = max(3 * abs(db - da), 0.02 * max(da, db))

    def h(w):
        guess = da + (db - da) * (w - wa) / (wb - wa)
        p = _follow(fiber, pump, w, guess, hw)
        if p is None or p.trivial:
            raise NotFoundError("lost the contour branch during refinement")
        return _residual(kind, p.T_s, p.T_i), p

    ra, _ = h(wa)
    rb, _ = h(wb)
    if ra == 0:
        w = wa
    elif rb == 0:
        w = wb
    elif ra * rb > 0:
        raise NotFoundError("no sign change after branch continuation")
    else:
        w = brentq(lambda x: h(x)[0], wa, wb, xtol=1e-10 * wa, rtol=1e-14, maxiter=200)
    return h(w)[1]


def _crossings(fiber, pump, kind, branches):
    pts = []
    for rows in branches:
        res = [_residual(kind, r[2], r[3]) for r in rows]
        for k in range(len(rows) - 1):
            if res[k] == 0 or res[k] * res[k + 1] < 0:
                try:
                    pts.append(_refine_crossing(fiber, pump, kind, rows[k], rows[k + 1]))
                except (NotFoundError, ValueError, DomainError):
                    continue
    # de-duplicate (a zero at a shared sample may be found twice)
    uniq = []
    for p in sorted(pts, key=lambda q: (q.omega1, q.omega_s)):
        if uniq and abs(p.omega1 - uniq[-1].omega1) < 1e-9 * p.omega1 \
                and abs(p.omega_s - uniq[-1].omega_s) < 1e-9 * p.omega_s:
            continue
        uniq.append(p)
    return uniq


def default_window(fiber: FiberSpec, axis: FiberAxis = FiberAxis.X, pad: float = 0.05):
    """Pump angular-frequency window spanning the ZDW band padded by ``pad``."""
    zdw = zero_dispersion_band(fiber, axis)
    if zdw is None:
        raise NotFoundError("fiber has fewer than two zero-dispersion wavelengths")
    lo_w = dispersion.wavelength_to_omega(zdw[1] * (1 + pad))
    hi_w = dispersion.wavelength_to_omega(zdw[0] * (1 - pad))
    return (lo_w, hi_w)


def zero_dispersion_band(fiber, axis=FiberAxis.X):
    z = dispersion.zero_dispersion_wavelengths(fiber, axis)
    if len(z) < 2:
        return None
    return (float(z[0]), float(z[-1]))


# ---------------------------------------------------------------------------
# Public searches


def find_symmetric_point(fiber: FiberSpec, pump: PumpSpec, window=None, step=None,
                         n_scan: int = 1000, branch: str = "outer") -> DesignPoint | None:
    """Intersection of the phase-matching contour with T_s + T_i = 0.

    For non-degenerate pumps pump 1 is swept with pump 2 fixed and the
    bandwidth-weighted (generalized) condition is used.  ``branch`` selects
    among several intersections: ``"outer"`` (largest detuning, default) or
    ``"inner"``.  Returns ``None`` when the contours do not intersect.
    """
    if window is None:
        window = default_window(fiber, pump.pump_axis)
    step = _default_step(window) if step is None else step
    branches = _branch_samples(fiber, pump, window, step, n_scan)
    pts = _crossings(fiber, pump, DesignKind.SYMMETRIC, branches)
    lo, hi = sorted(window)
    pts = [p for p in pts if lo <= p.omega1 <= hi
           and abs(p.T_s + p.T_i) < SYMMETRIC_TOL * 0.5 * (abs(p.T_s) + abs(p.T_i))]
    if not pts:
        return None
    if branch == "outer":
        best = max(pts, key=lambda p: abs(p.detuning))
    elif branch == "inner":
        best = min(pts, key=lambda p: abs(p.detuning))
    else:
        raise ValueError("branch must be 'outer' or 'inner'")
    return DesignPoint(best, DesignKind.SYMMETRIC, sigma=symmetric_bandwidth(best.T_s, best.T_i))


def _on_split_branch(fiber, pump, p: PhaseMatchPoint) -> bool:
    """True if ``p`` lies on the branch split off the trivial Delta = 0 line.

    Near zero detuning Delta k ~ Delta k(0) - k2(omega_p) Delta^2, so such a
    branch exists iff Delta k(0) k2 > 0; ``p`` is on it if it is the smallest
    non-trivial root at its pump.
    """
    pj = pump.with_pump1(p.omega1)
    if not pump.is_degenerate:
        return False
    dk0 = phase_mismatch(fiber, pj, pj.omega1, pj.omega1)
    k2 = float(dispersion.derivative(fiber, pj.sideband_axis, pj.omega1, 2))
    if not dk0 * k2 > 0:
        return False
    roots = [q for q in solve_sidebands(fiber, pj) if not q.trivial]
    if not roots:
        return False
    dmin = min(q.detuning for q in roots)
    return abs(p.detuning - dmin) <= 1e-6 * abs(p.detuning) + 1e-9 * p.omega1


def _family(kind, pump_wavelength, band, split):
    """Geometric label of an asymmetric point on the split-off branch.

    Inside the ZDW band: C (T_i = 0) / D (T_s = 0); outside the band:
    E (T_s = 0) / F (T_i = 0).  Outer-loop points carry no family label.
    """
    if not split or band is None:
        return None
    inside = band[0] < pump_wavelength < band[1]
    if kind is DesignKind.ASYMMETRIC_S:
        return "D" if inside else "E"
    return "C" if inside else "F"


def find_asymmetric_points(fiber: FiberSpec, pump: PumpSpec, window=None, step=None,
                           n_scan: int = 1000) -> list[DesignPoint]:
    """All intersections of T_s = 0 and T_i = 0 with the phase-matching contour."""
    if window is None:
        window = default_window(fiber, pump.pump_axis, pad=ASYMMETRIC_PAD)
    step = _default_step(window) if step is None else step
    branches = _branch_samples(fiber, pump, window, step, n_scan)
    band = zero_dispersion_band(fiber, pump.pump_axis)
    lo, hi = sorted(window)
    out = []
    for kind in (DesignKind.ASYMMETRIC_S, DesignKind.ASYMMETRIC_I):
        for p in _crossings(fiber, pump, kind, branches):
            if not lo <= p.omega1 <= hi:
                continue
            # the refined root leaves the vanishing coefficient at ~1e-10 of the
            # other one with arbitrary sign; the point lies on the locus, so snap it
            if kind is DesignKind.ASYMMETRIC_S:
                p = replace(p, T_s=0.0, theta_si=orientation_angle(0.0, p.T_i))
            else:
                p = replace(p, T_i=0.0, theta_si=orientation_angle(p.T_s, 0.0))
            other = p.T_i if kind is DesignKind.ASYMMETRIC_S else p.T_s
            cond = f"sigma >> {1.0 / abs(other):.6g} rad/s (1/|T_{'i' if kind is DesignKind.ASYMMETRIC_S else 's'}|)"
            fam = _family(kind, p.wavelength_p, band, _on_split_branch(fiber, pump, p))
            out.append(DesignPoint(p, kind, sigma=None, bandwidth_condition=cond, family=fam))
    out.sort(key=lambda d: (d.point.omega1, d.point.omega_s))
    return out


FAMILIES = ("C", "D", "E", "F")


@dataclass
class SweepRow:
    delta_n: float
    delta_d: float
    family: str
    point: DesignPoint | None

    def as_row(self) -> dict:
        p = self.point
        nan = float("nan")
        return {
            "delta_n": self.delta_n,
            "lambda_p_nm": p.wavelength_p * 1e9 if p else nan,
            "lambda_s_nm": p.wavelength_s * 1e9 if p else nan,
            "lambda_i_nm": p.wavelength_i * 1e9 if p else nan,
            "family": self.family,
        }


def birefringence_sweep(fiber: FiberSpec, delta_n_values, reference_wavelength: float = 800e-9,
                        window=None, step=None, n_scan: int = 1000):
    """Asymmetric point families C-F versus birefringence.

    Each ``delta_n`` (at ``reference_wavelength``) is mapped to a core offset
    ``delta_d`` through the dispersion model; the cross-polarized process is
    then searched with zero pump power.  Returns ``(rows, windows)``: one
    :class:`SweepRow` per (delta_n, family), absent families with
    ``point=None``, and per delta_n the pump-wavelength intervals (m) on the
    innermost branch where ``T_s T_i <= 0``.
    """
    rows = []
    windows = {}
    base = fiber.with_(delta_d=0.0)
    for dn in delta_n_values:
        dn = float(dn)
        dd = 0.0 if dn == 0 else dispersion.delta_d_for_birefringence(base, dn, reference_wavelength)
        fib = base.with_(delta_d=dd)
        w = default_window(base, pad=ASYMMETRIC_PAD) if window is None else window
        pump = PumpSpec.degenerate(0.5 * sum(w), 1e9, 0.0, Process.CROSS_POL_DEGENERATE)
        found = find_asymmetric_points(fib, pump, w, step, n_scan)
        by_family = {}
        for d in found:
            if d.family and d.family not in by_family:
                by_family[d.family] = d
        for fam in FAMILIES:
            rows.append(SweepRow(dn, dd, fam, by_family.get(fam)))
        windows[dn] = _factorable_windows(fib, pump, w, step, n_scan)
    return rows, windows


def _factorable_windows(fiber, pump, window, step, n_scan):
    step = _default_step(window) if step is None else step
    cont = trace_phasematch_contour(fiber, pump, window, step, n_scan=n_scan).nontrivial()
    if not len(cont):
        return []
    flags = []
    for w1 in np.unique(cont.pump_omega):
        sel = cont.pump_omega == w1
        d = float(np.min(cont.detuning[sel]))
        pj = pump.with_pump1(float(w1))
        ts, ti, _ = gvm_coefficients(fiber, pj, pj.center + d, pj.center - d)
        flags.append((2 * math.pi * c / w1, factorable_possible(ts, ti)))
    flags.sort()
    spans, start, last = [], None, None
    for lam, ok in flags:
        if ok and start is None:
            start = lam
        if not ok and start is not None:
            spans.append((start, last))
            start = None
        last = lam
    if start is not None:
        spans.append((start, last))
    return spans


def ultra_broadband_point(fiber: FiberSpec, pump: PumpSpec | None = None,
                          window=(0.4e-6, 1.8e-6)) -> DesignPoint | None:
    """Pump at a zero-dispersion wavelength and report the phase-matched span.

    ``window`` is a wavelength interval (m).  When it holds several ZDWs the
    one with the smallest ``|k4|`` is chosen, i.e. the closest approach to
    k2 = k4 = 0.  The reported ``bandwidth`` is the full sideband extent
    ``omega_s - omega_i`` of the outermost non-trivial root at that pump,
    computed with the template's power and a quasi-monochromatic pump.
    Returns ``None`` if no ZDW lies in the window.
    """
    lo, hi = sorted(window)
    axis = FiberAxis.X if pump is None else pump.pump_axis
    zdws = dispersion.zero_dispersion_wavelengths(fiber, axis, window=(lo, hi))
    if len(zdws) == 0:
        return None
    cands = []
    for lam in zdws:
        w = dispersion.wavelength_to_omega(lam)
        k4 = float(dispersion.derivative(fiber, axis, w, 4))
        cands.append((abs(k4), w, k4, lam))
    _, w0, k4, lam0 = min(cands)
    template = pump or PumpSpec.degenerate(w0, 1e9)
    pj = template.with_pump1(w0)
    roots = [p for p in solve_sidebands(fiber, pj) if not p.trivial]
    if not roots:
        return None
    outer = max(roots, key=lambda p: p.detuning)
    bw = outer.omega_s - outer.omega_i
    extra = {
        "pump_omega": w0,
        "k4": k4,
        "bandwidth": bw,
        "bandwidth_nm": (outer.wavelength_i - outer.wavelength_s) * 1e9,
        "bandwidth_definition": "full sideband extent of the Delta k = 0 contour at the pump",
    }
    return DesignPoint(outer, DesignKind.ULTRA_BROADBAND, extra=extra)
