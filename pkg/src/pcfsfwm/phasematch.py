"""Phase matching and group-velocity matching for fiber SFWM.

Three processes are supported:

``CO_POL_DEGENERATE``
    one pump, all four fields on axis X.
``CO_POL_NONDEGENERATE``
    two pumps at different frequencies/bandwidths, all fields on axis X.
``CROSS_POL_DEGENERATE``
    one pump on axis X creating a signal/idler pair on axis Y (xx -> yy).

Sideband detunings are measured from the mean pump frequency; the signal is
always the upper sideband (``detuning > 0``).  ``T_s``, ``T_i`` and ``tau_p`` are
length-scaled group-delay mismatches in seconds.
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
from pcfsfwm.errors import DomainError

ROOT_TOL = 1e-6  # rad/m
# Group-velocity curves are plotted, not re-solved; each residual costs a
# derivative stencil, so they stop at this relative detuning tolerance.
GVM_REL_TOL = 1e-10

# Fractional margin kept between the outermost sideband and the Sellmeier
# window so that group delays can still be differentiated there.
_EDGE_MARGIN = 0.012


class Process(enum.Enum):
    CO_POL_DEGENERATE = "copol-degenerate"
    CO_POL_NONDEGENERATE = "copol-nondegenerate"
    CROSS_POL_DEGENERATE = "crosspol-degenerate"


class GVMKind(enum.Enum):
    SYMMETRIC = "symmetric"
    ASYMMETRIC_S = "asymmetric-s"
    ASYMMETRIC_I = "asymmetric-i"
    GENERALIZED = "generalized"


@dataclass(frozen=True)
class PumpSpec:
    """Pump fields.  ``sigma`` is the 1/e half-width of the Gaussian amplitude."""

    omega1: float
    omega2: float
    sigma1: float
    sigma2: float
    power1: float = 0.0
    power2: float = 0.0
    process: Process = Process.CO_POL_DEGENERATE
    gamma1: float | None = None
    gamma2: float | None = None

    def __post_init__(self):
        if not (self.sigma1 > 0 and self.sigma2 > 0):
            raise DomainError("pump bandwidths must be > 0")
        if self.power1 < 0 or self.power2 < 0:
            raise DomainError("pump powers must be >= 0")
        if self.process is not Process.CO_POL_NONDEGENERATE:
            if not (self.omega1 == self.omega2 and self.sigma1 == self.sigma2
                    and self.power1 == self.power2):
                raise DomainError(
                    f"{self.process.value} requires identical pump frequency, bandwidth and power"
                )

    @classmethod
    def degenerate(cls, omega, sigma, power=0.0, process=Process.CO_POL_DEGENERATE,
                   gamma=None) -> "PumpSpec":
        return cls(omega, omega, sigma, sigma, power, power, process, gamma, gamma)

    @property
    def is_degenerate(self) -> bool:
        return self.process is not Process.CO_POL_NONDEGENERATE

    @property
    def center(self) -> float:
        return 0.5 * (self.omega1 + self.omega2)

    @property
    def pump_axis(self) -> FiberAxis:
        return FiberAxis.X

    @property
    def sideband_axis(self) -> FiberAxis:
        if self.process is Process.CROSS_POL_DEGENERATE:
            return FiberAxis.Y
        return FiberAxis.X

    @property
    def weight1(self) -> float:
        """sigma1^2 / (sigma1^2 + sigma2^2)."""
        return self.sigma1**2 / (self.sigma1**2 + self.sigma2**2)

    def with_pump1(self, omega) -> "PumpSpec":
        """Move pump 1 (and pump 2 as well for the single-pump processes)."""
        if self.is_degenerate:
            return replace(self, omega1=omega, omega2=omega)
        return replace(self, omega1=omega)

    def with_(self, **changes) -> "PumpSpec":
        return replace(self, **changes)

    def power_term(self, fiber: FiberSpec) -> float:
        g1 = fiber.gamma if self.gamma1 is None else self.gamma1
        g2 = fiber.gamma if self.gamma2 is None else self.gamma2
        nl = g1 * self.power1 + g2 * self.power2
        if self.process is Process.CROSS_POL_DEGENERATE:
            return nl / 3.0
        return nl


@dataclass(frozen=True)
class PhaseMatchPoint:
    omega1: float
    omega2: float
    omega_s: float
    omega_i: float
    T_s: float
    T_i: float
    tau_p: float
    theta_si: float
    delta_k: float
    trivial: bool = False

    @property
    def pump_omega(self) -> float:
        return 0.5 * (self.omega1 + self.omega2)

    @property
    def detuning(self) -> float:
        return self.omega_s - self.pump_omega

    @property
    def wavelength_s(self) -> float:
        return 2 * math.pi * c / self.omega_s

    @property
    def wavelength_i(self) -> float:
        return 2 * math.pi * c / self.omega_i

    @property
    def wavelength_p(self) -> float:
        return 2 * math.pi * c / self.omega1

    def as_dict(self) -> dict:
        return {
            "omega1": self.omega1, "omega2": self.omega2,
            "omega_s": self.omega_s, "omega_i": self.omega_i,
            "lambda1_nm": 2e9 * math.pi * c / self.omega1,
            "lambda2_nm": 2e9 * math.pi * c / self.omega2,
            "lambda_s_nm": self.wavelength_s * 1e9,
            "lambda_i_nm": self.wavelength_i * 1e9,
            "T_s": self.T_s, "T_i": self.T_i, "tau_p": self.tau_p,
            "theta_si_deg": None if math.isnan(self.theta_si) else self.theta_si,
            "delta_k": self.delta_k, "trivial": self.trivial,
        }


@dataclass
class Contour:
    """Points of a contour in (pump frequency, signal detuning) space.

    ``pump_omega`` is pump 1's frequency.  Only the ``detuning >= 0`` half is
    stored; the idler detuning is always ``-detuning``.  ``branch`` labels the
    polyline each point belongs to after nearest-neighbor continuation.
    """

    pump_omega: np.ndarray
    detuning: np.ndarray
    theta_si: np.ndarray
    branch: np.ndarray
    trivial: np.ndarray
    kind: str = "phasematch"
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.pump_omega)

    @property
    def pump_wavelength(self) -> np.ndarray:
        return 2 * np.pi * c / self.pump_omega

    def polylines(self) -> list[np.ndarray]:
        """One (n, 2) array of (pump_omega, detuning) per branch."""
        out = []
        for b in np.unique(self.branch):
            sel = self.branch == b
            out.append(np.column_stack([self.pump_omega[sel], self.detuning[sel]]))
        return out

    def mirrored(self) -> "Contour":
        """Both halves: each point plus its signal/idler relabeled twin."""
        off = int(self.branch.max()) + 1 if len(self) else 0
        # Swapping T_s <-> T_i maps theta to sign(theta) 90 - theta.
        swapped = np.where(self.theta_si >= 0, 90.0, -90.0) - self.theta_si
        return Contour(
            np.concatenate([self.pump_omega, self.pump_omega]),
            np.concatenate([self.detuning, -self.detuning]),
            np.concatenate([self.theta_si, swapped]),
            np.concatenate([self.branch, self.branch + off]),
            np.concatenate([self.trivial, self.trivial]),
            self.kind, dict(self.meta),
        )

    def nontrivial(self) -> "Contour":
        sel = ~self.trivial
        return Contour(self.pump_omega[sel], self.detuning[sel], self.theta_si[sel],
                       self.branch[sel], self.trivial[sel], self.kind, dict(self.meta))

    def pump_wavelength_extent(self) -> float:
        """Span (m) of pump wavelengths carrying non-trivial points."""
        nt = self.nontrivial()
        if not len(nt):
            return 0.0
        lam = nt.pump_wavelength
        return float(lam.max() - lam.min())


def _k(fiber, axis, omega):
    return np.asarray(dispersion.propagation_constant(fiber, axis, omega))


def phase_mismatch(fiber: FiberSpec, pump: PumpSpec, omega_s, omega_i, omega1=None):
    """Delta k in rad/m, including the nonlinear phase-modulation term.

    ``omega1`` is the pump-1 frequency (defaults to the pump center); pump 2 is
    fixed by energy conservation at ``omega_s + omega_i - omega1``.  For the
    cross-polarized process without an explicit ``omega1`` the inputs must
    conserve energy with the pump, ``omega_s + omega_i = 2 omega_p``.
    """
    ws = np.asarray(omega_s, dtype=float)
    wi = np.asarray(omega_i, dtype=float)
    ws, wi = np.broadcast_arrays(ws, wi)
    if omega1 is None:
        w1 = np.full(ws.shape, pump.omega1)
        if pump.process is Process.CROSS_POL_DEGENERATE:
            err = np.abs(ws + wi - 2 * pump.omega1)
            if np.any(err > 1e-12 * pump.omega1):
                raise ValueError(
                    "cross-polarized phase mismatch requires omega_s + omega_i = 2 omega_p"
                )
    else:
        w1 = np.broadcast_to(np.asarray(omega1, dtype=float), ws.shape)
    w2 = ws + wi - w1
    pa, sa = pump.pump_axis, pump.sideband_axis
    n = ws.size
    kp = _k(fiber, pa, np.concatenate([w1.ravel(), w2.ravel()]))
    ksb = _k(fiber, sa, np.concatenate([ws.ravel(), wi.ravel()]))
    dk = kp[:n] + kp[n:] - ksb[:n] - ksb[n:] - pump.power_term(fiber)
    dk = dk.reshape(ws.shape)
    return float(dk) if dk.ndim == 0 else dk


def gvm_coefficients(fiber: FiberSpec, pump: PumpSpec, omega_s0, omega_i0):
    """(T_s, T_i, tau_p) at the given sideband center frequencies."""
    ws = np.atleast_1d(np.asarray(omega_s0, dtype=float))
    wi = np.atleast_1d(np.asarray(omega_i0, dtype=float))
    ws, wi = np.broadcast_arrays(ws, wi)
    L = fiber.length
    kp = np.asarray(dispersion.derivative(fiber, pump.pump_axis,
                                          np.array([pump.omega1, pump.omega2]), 1))
    n = ws.size
    ksb = np.asarray(dispersion.derivative(
        fiber, pump.sideband_axis, np.concatenate([ws.ravel(), wi.ravel()]), 1))
    k1_1, k1_2 = kp
    if pump.is_degenerate:
        k1_1 = k1_2
    tau_s = L * (k1_2 - ksb[:n])
    tau_i = L * (k1_2 - ksb[n:])
    tau_p = L * (k1_1 - k1_2)
    w = pump.weight1
    T_s = (tau_s + tau_p * w).reshape(ws.shape)
    T_i = (tau_i + tau_p * w).reshape(ws.shape)
    if np.ndim(omega_s0) == 0 and np.ndim(omega_i0) == 0:
        return float(T_s[0]), float(T_i[0]), float(tau_p)
    return T_s, T_i, float(tau_p)


def orientation_angle(T_s, T_i) -> float:
    """theta_si = -arctan(T_s / T_i) in degrees, in [-90, 90]."""
    if T_s == 0 and T_i == 0:
        raise ValueError("orientation angle undefined for T_s = T_i = 0")
    if T_i == 0:
        return -90.0 if T_s > 0 else 90.0
    return -math.degrees(math.atan(T_s / T_i))


def _max_detuning(center: float) -> float:
    lo, hi = dispersion.omega_window()
    lo *= 1 + _EDGE_MARGIN
    hi *= 1 - _EDGE_MARGIN
    return max(0.0, min(center - lo, hi - center))


def _make_point(fiber, pump, omega_s, omega_i, trivial=False) -> PhaseMatchPoint:
    dk = phase_mismatch(fiber, pump, omega_s, omega_i, omega1=pump.omega1)
    if trivial:
        return PhaseMatchPoint(pump.omega1, pump.omega2, omega_s, omega_i,
                               0.0, 0.0, 0.0, float("nan"), dk, True)
    ts, ti, tp = gvm_coefficients(fiber, pump, omega_s, omega_i)
    theta = orientation_angle(ts, ti) if (ts or ti) else float("nan")
    return PhaseMatchPoint(pump.omega1, pump.omega2, omega_s, omega_i, ts, ti, tp,
                           theta, dk, False)


def _detuning_mismatch(fiber, pump):
    ctr = pump.center

    def f(d):
        return phase_mismatch(fiber, pump, ctr + d, ctr - d, omega1=pump.omega1)

    return f


def _refine(f, a, b, fa, fb, rel_tol=8 * np.finfo(float).eps):
    """Bracketed root; the default (near machine precision in detuning) keeps
    |Delta k| < ROOT_TOL at phase-matching roots."""
    if fa == 0:
        return a
    if fb == 0:
        return b
    return brentq(f, a, b, xtol=rel_tol * max(abs(a), abs(b), 1.0),
                  rtol=4 * np.finfo(float).eps, maxiter=200)


def _trivial_detuning(pump) -> float:
    return 0.0 if pump.is_degenerate else 0.5 * abs(pump.omega1 - pump.omega2)


def _refine_checked(f, pump, a, b):
    """Refine a table-detected sign change against the exact mismatch.

    The table and the exact model can disagree in sign right at a root; if
    the exact values do not bracket, the trivial root is returned when it
    lies in [a, b] and the candidate is dropped otherwise.
    """
    fa, fb = f(a), f(b)
    if fa * fb <= 0:
        return _refine(f, a, b, fa, fb)
    d0 = _trivial_detuning(pump)
    if a <= d0 <= b:
        return d0
    return None


def _sign_roots(x, y):
    """Indices i where y[i] == 0 or y changes sign between i and i+1."""
    zeros = np.nonzero(y == 0)[0]
    cross = np.nonzero(np.sign(y[:-1]) * np.sign(y[1:]) < 0)[0]
    return zeros, cross


def _is_trivial(pump, detuning, scale):
    if pump.is_degenerate:
        return abs(detuning) <= 1e-9 * scale
    half = 0.5 * abs(pump.omega1 - pump.omega2)
    return abs(abs(detuning) - half) <= 1e-9 * scale


def solve_sidebands(fiber: FiberSpec, pump: PumpSpec, n_scan: int = 2000,
                    max_detuning: float | None = None) -> list[PhaseMatchPoint]:
    """All phase-matched sideband pairs for the given pump(s), sorted by detuning."""
    ctr = pump.center
    dmax = _max_detuning(ctr) if max_detuning is None else max_detuning
    if dmax <= 0:
        return []
    f = _detuning_mismatch(fiber, pump)
    grid = np.linspace(0.0, dmax, n_scan + 1)
    vals = f(grid)
    zeros, cross = _sign_roots(grid, vals)
    roots = [grid[i] for i in zeros]
    for i in cross:
        roots.append(_refine(f, grid[i], grid[i + 1], vals[i], vals[i + 1]))
    roots.sort()
    out = []
    for d in roots:
        out.append(_make_point(fiber, pump, ctr + d, ctr - d,
                               trivial=_is_trivial(pump, d, ctr)))
    return out


# ---------------------------------------------------------------------------
# Contours.  Scans use a uniform-frequency table of k and k1 so that a whole
# (pump, detuning) map costs one vectorized dispersion solve; every reported
# point is then refined against the exact dispersion model.


@dataclass
class _Table:
    omega0: float
    step: float
    k_pump: np.ndarray
    k_sb: np.ndarray
    k1_pump: np.ndarray | None = None
    k1_sb: np.ndarray | None = None

    def index(self, omega):
        return int(round((omega - self.omega0) / self.step))


def _build_table(fiber, pump, omega0, step, n, with_k1):
    om = omega0 + step * np.arange(n)
    kp = _k(fiber, pump.pump_axis, om)
    ks = kp if pump.sideband_axis is pump.pump_axis else _k(fiber, pump.sideband_axis, om)
    t = _Table(omega0, step, kp, ks)
    if with_k1:
        t.k1_pump = np.asarray(dispersion.derivative(fiber, pump.pump_axis, om, 1))
        t.k1_sb = (t.k1_pump if pump.sideband_axis is pump.pump_axis
                   else np.asarray(dispersion.derivative(fiber, pump.sideband_axis, om, 1)))
    return t


def _pump_grid(omega_range, step):
    lo, hi = sorted(omega_range)
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def _layout(pump, omega_range, step, n_scan):
    """Uniform table layout shared by all pump columns of a contour scan.

    Returns (table origin, table step, number of table points, pump offsets in
    table units, center offsets in table units).
    """
    pumps = _pump_grid(omega_range, step)
    if not pump.is_degenerate:
        # pump 1 sits on omega2 + k * step so both pumps and the center are table nodes
        lo = min(omega_range)
        k0 = math.ceil((lo - pump.omega2) / step - 1e-9)
        pumps = pump.omega2 + step * (k0 + np.arange(len(pumps)))
        pumps = pumps[pumps <= max(omega_range) * (1 + 1e-12)]
    centers = pumps if pump.is_degenerate else 0.5 * (pumps + pump.omega2)
    dmax = max(_max_detuning(ctr) for ctr in centers)
    if dmax <= 0:
        raise DomainError("pump range lies outside the dispersion window")
    # Center spacing in table units must be an integer.
    ctr_step = step if pump.is_degenerate else 0.5 * step
    sub = max(1, int(math.ceil(ctr_step / (dmax / n_scan))))
    dstep = ctr_step / sub
    lo, hi = dispersion.omega_window()
    lo *= 1 + _EDGE_MARGIN
    hi *= 1 - _EDGE_MARGIN
    if pump.is_degenerate:
        origin = pumps[0] - math.floor((pumps[0] - lo) / dstep) * dstep
    else:
        origin = pump.omega2 - math.floor((pump.omega2 - lo) / dstep) * dstep
    n = int(math.floor((hi - origin) / dstep)) + 1
    ctr_idx = np.rint((centers - origin) / dstep).astype(int)
    p1_idx = np.rint((pumps - origin) / dstep).astype(int)
    return origin, dstep, n, pumps, p1_idx, ctr_idx


def _link_branches(pump_idx, det, max_jump):
    """Nearest-neighbor continuation between successive pump columns."""
    order = np.lexsort((det, pump_idx))
    branch = np.full(len(det), -1, dtype=int)
    nb = 0
    cols = {}
    for j in order:
        cols.setdefault(pump_idx[j], []).append(j)
    keys = sorted(cols)
    prev_key = None
    for key in keys:
        cur = cols[key]
        prev = cols.get(prev_key, []) if prev_key is not None and key - prev_key == 1 else []
        taken = set()
        pairs = sorted(
            ((abs(det[a] - det[b]), a, b) for a in cur for b in prev),
            key=lambda t: t[0],
        )
        for dist, a, b in pairs:
            if branch[a] >= 0 or b in taken or dist > max_jump:
                continue
            branch[a] = branch[b]
            taken.add(b)
        for a in cur:
            if branch[a] < 0:
                branch[a] = nb
                nb += 1
        prev_key = key
    return branch


def trace_phasematch_contour(fiber: FiberSpec, pump: PumpSpec, omega_range, step: float,
                             n_scan: int = 2000) -> Contour:
    """Delta k = 0 contour for pump-1 frequencies spanning ``omega_range``.

    For non-degenerate pumps pump 2 stays fixed and pump 1 is swept.
    """
    origin, dstep, n, pumps, p1_idx, ctr_idx = _layout(pump, omega_range, step, n_scan)
    t = _build_table(fiber, pump, origin, dstep, n, with_k1=False)
    nl = pump.power_term(fiber)
    p2_idx = t.index(pump.omega2) if not pump.is_degenerate else None

    rows = []
    for j, (w1, i1, ci) in enumerate(zip(pumps, p1_idx, ctr_idx)):
        if ci < 0 or ci >= n or i1 < 0 or i1 >= n:
            continue
        m = np.arange(0, min(ci, n - 1 - ci) + 1)
        pump_j = pump.with_pump1(float(w1))
        ctr = pump_j.center
        kp = t.k_pump[i1] + (t.k_pump[i1] if pump.is_degenerate else t.k_pump[p2_idx])
        vals = kp - t.k_sb[ci + m] - t.k_sb[ci - m] - nl
        det = m * dstep
        zeros, cross = _sign_roots(det, vals)
        f = _detuning_mismatch(fiber, pump_j)
        found = [det[i] for i in zeros]
        for i in cross:
            d = _refine_checked(f, pump_j, det[i], det[i + 1])
            if d is not None:
                found.append(d)
        for d in found:
            triv = _is_trivial(pump_j, d, ctr)
            if triv:
                theta = float("nan")
            else:
                ts, ti, _ = gvm_coefficients(fiber, pump_j, ctr + d, ctr - d)
                theta = orientation_angle(ts, ti) if (ts or ti) else float("nan")
            rows.append((j, float(w1), float(d), theta, triv))
    return _assemble(rows, "phasematch", pumps, step, pump,
                     meta={"power_term": nl, "process": pump.process.value})


def _assemble(rows, kind, pumps, step, pump, meta):
    if not rows:
        e = np.zeros(0)
        return Contour(e, e, e, np.zeros(0, dtype=int), np.zeros(0, dtype=bool), kind, meta)
    j = np.array([r[0] for r in rows])
    w = np.array([r[1] for r in rows])
    d = np.array([r[2] for r in rows])
    th = np.array([r[3] for r in rows])
    tr = np.array([r[4] for r in rows], dtype=bool)
    # Trivial points never join a non-trivial loop.
    span = float(np.max(d)) if len(d) else 1.0
    max_jump = max(0.05 * span, 4 * step)
    branch = np.empty(len(d), dtype=int)
    nt = ~tr
    branch[nt] = _link_branches(j[nt], d[nt], max_jump) if nt.any() else []
    if tr.any():
        base = int(branch[nt].max()) + 1 if nt.any() else 0
        branch[tr] = base + _link_branches(j[tr], d[tr], max_jump)
    order = np.lexsort((d, w))
    return Contour(w[order], d[order], th[order], branch[order], tr[order], kind, meta)


def _gvm_residual_fn(fiber, pump, kind):
    """Exact GVM condition residual as a function of detuning, plus its scale."""
    ctr = pump.center
    wgt = pump.weight1

    def f(d):
        ws, wi = ctr + d, ctr - d
        ts, ti, tp = gvm_coefficients(fiber, pump, ws, wi)
        if kind is GVMKind.SYMMETRIC:
            # pump 2 plays the degenerate pump: tau_s + tau_i = 0
            return (ts - tp * wgt) + (ti - tp * wgt)
        if kind is GVMKind.GENERALIZED:
            return ts + ti
        if kind is GVMKind.ASYMMETRIC_S:
            return ts
        return ti

    return f


def gvm_contour(fiber: FiberSpec, pump: PumpSpec, omega_range, step: float,
                kind: GVMKind | str = GVMKind.SYMMETRIC, n_scan: int = 2000) -> Contour:
    """Locus of (pump frequency, detuning) satisfying a group-velocity condition.

    ``SYMMETRIC``: tau_s + tau_i = 0 (pump 2 as the degenerate pump);
    ``GENERALIZED``: T_s + T_i = 0 with the bandwidth-weighted pump mismatch;
    ``ASYMMETRIC_S`` / ``ASYMMETRIC_I``: T_s = 0 / T_i = 0.
    """
    kind = GVMKind(kind)
    if kind is GVMKind.GENERALIZED and pump.is_degenerate:
        raise ValueError("the generalized GVM condition needs non-degenerate pumps")
    origin, dstep, n, pumps, p1_idx, ctr_idx = _layout(pump, omega_range, step, n_scan)
    t = _build_table(fiber, pump, origin, dstep, n, with_k1=True)
    L = fiber.length
    wgt = pump.weight1
    p2_idx = t.index(pump.omega2)

    rows = []
    for j, (w1, i1, ci) in enumerate(zip(pumps, p1_idx, ctr_idx)):
        if ci < 0 or ci >= n or i1 < 0 or i1 >= n:
            continue
        m = np.arange(1, min(ci, n - 1 - ci) + 1)
        k1_2 = t.k1_pump[i1] if pump.is_degenerate else t.k1_pump[p2_idx]
        k1_1 = t.k1_pump[i1]
        tau_p = L * (k1_1 - k1_2)
        tau_s = L * (k1_2 - t.k1_sb[ci + m])
        tau_i = L * (k1_2 - t.k1_sb[ci - m])
        if kind is GVMKind.SYMMETRIC:
            vals = tau_s + tau_i
        elif kind is GVMKind.GENERALIZED:
            vals = tau_s + tau_i + 2 * tau_p * wgt
        elif kind is GVMKind.ASYMMETRIC_S:
            vals = tau_s + tau_p * wgt
        else:
            vals = tau_i + tau_p * wgt
        det = m * dstep
        pump_j = pump.with_pump1(float(w1))
        f = _gvm_residual_fn(fiber, pump_j, kind)
        zeros, cross = _sign_roots(det, vals)
        found = [det[i] for i in zeros]
        for i in cross:
            fa, fb = f(det[i]), f(det[i + 1])
            if fa * fb <= 0:
                found.append(_refine(f, det[i], det[i + 1], fa, fb, GVM_REL_TOL))
        for d in found:
            ctr = pump_j.center
            ts, ti, _ = gvm_coefficients(fiber, pump_j, ctr + d, ctr - d)
            theta = orientation_angle(ts, ti) if (ts or ti) else float("nan")
            rows.append((j, float(w1), float(d), theta, False))
    return _assemble(rows, kind.value, pumps, step, pump, meta={"process": pump.process.value})


def local_sideband(fiber: FiberSpec, pump: PumpSpec, detuning_guess: float,
                   half_width: float) -> PhaseMatchPoint | None:
    """Phase-matched point near ``detuning_guess`` (used for continuation)."""
    f = _detuning_mismatch(fiber, pump)
    a = max(detuning_guess - half_width, 0.0)
    b = min(detuning_guess + half_width, _max_detuning(pump.center))
    if b <= a:
        return None
    xs = np.linspace(a, b, 9)
    ys = f(xs)
    zeros, cross = _sign_roots(xs, ys)
    cands = [xs[i] for i in zeros]
    for i in cross:
        cands.append(_refine(f, xs[i], xs[i + 1], ys[i], ys[i + 1]))
    if not cands:
        return None
    d = min(cands, key=lambda x: abs(x - detuning_guess))
    ctr = pump.center
    return _make_point(fiber, pump, ctr + d, ctr - d, trivial=_is_trivial(pump, d, ctr))
