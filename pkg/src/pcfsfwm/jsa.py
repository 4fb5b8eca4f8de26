"""Joint spectral amplitude of the generated photon pair.

Two constructions are provided:

* :func:`jsa_linear` -- closed form from the first-order expansion of the
  phase mismatch about a phase-matched point (Gaussian pump envelope times a
  sinc or complex-error-function phase-matching function);
* :func:`jsa_full` -- direct Gauss-Legendre quadrature over the pump-1
  frequency with the full, non-linearized phase mismatch.

Grids are shape-only: every constructor returns a unit-l2 grid, i.e.
``sum |F|^2 d_omega_s d_omega_i = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import Chebyshev
from scipy import special

from pcfsfwm import dispersion
from pcfsfwm.errors import DomainError, NumericError
from pcfsfwm.phasematch import PhaseMatchPoint, PumpSpec

UNIT_L2 = "unit-l2"
PEAK_1 = "peak-1"

# Gaussian product of the two pump amplitudes is integrated over +-this many
# of its 1/e half-widths; exp(-36) is far below double-precision relevance.
_QUAD_HALF_SPAN = 6.0


@dataclass(frozen=True)
class GridSpec:
    center_s: float
    center_i: float
    half_width_s: float
    half_width_i: float
    n_s: int
    n_i: int

    def __post_init__(self):
        if self.n_s < 2 or self.n_i < 2:
            raise DomainError("grid needs at least 2 points per axis")
        if not (self.half_width_s > 0 and self.half_width_i > 0):
            raise DomainError("grid half-widths must be > 0")

    @property
    def omega_s(self) -> np.ndarray:
        return np.linspace(self.center_s - self.half_width_s,
                           self.center_s + self.half_width_s, self.n_s)

    @property
    def omega_i(self) -> np.ndarray:
        return np.linspace(self.center_i - self.half_width_i,
                           self.center_i + self.half_width_i, self.n_i)

    @property
    def d_omega_s(self) -> float:
        return 2 * self.half_width_s / (self.n_s - 1)

    @property
    def d_omega_i(self) -> float:
        return 2 * self.half_width_i / (self.n_i - 1)

    def resized(self, n_s: int, n_i: int | None = None) -> "GridSpec":
        return replace(self, n_s=n_s, n_i=n_s if n_i is None else n_i)

    def transposed(self) -> "GridSpec":
        return GridSpec(self.center_i, self.center_s, self.half_width_i,
                        self.half_width_s, self.n_i, self.n_s)


@dataclass(frozen=True)
class FilterSpec:
    """Rectangular passband of full width ``full_width`` (rad/s)."""

    center: float
    full_width: float

    def __post_init__(self):
        if not self.full_width > 0:
            raise DomainError("filter full_width must be > 0")

    def mask(self, omega: np.ndarray) -> np.ndarray:
        return np.abs(omega - self.center) <= 0.5 * self.full_width


@dataclass(frozen=True)
class SpectralGrid:
    """Complex amplitude table ``amplitude[j, k] = F(omega_s[j], omega_i[k])``."""

    spec: GridSpec
    amplitude: np.ndarray
    normalization: str = UNIT_L2

    def __post_init__(self):
        if self.amplitude.shape != (self.spec.n_s, self.spec.n_i):
            raise ValueError("amplitude shape does not match the grid spec")
        if not np.all(np.isfinite(self.amplitude)):
            raise NumericError("non-finite JSA entries")

    @property
    def cell(self) -> float:
        return self.spec.d_omega_s * self.spec.d_omega_i

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitude) ** 2) * self.cell))

    def normalized(self) -> "SpectralGrid":
        nrm = self.l2_norm()
        if nrm == 0:
            raise ValueError("cannot normalize an all-zero grid")
        return SpectralGrid(self.spec, self.amplitude / nrm, UNIT_L2)

    def peak_normalized(self) -> "SpectralGrid":
        peak = np.max(np.abs(self.amplitude))
        if peak == 0:
            raise ValueError("cannot normalize an all-zero grid")
        return SpectralGrid(self.spec, self.amplitude / peak, PEAK_1)

    def intensity(self) -> np.ndarray:
        return np.abs(self.amplitude) ** 2

    def transposed(self) -> "SpectralGrid":
        return SpectralGrid(self.spec.transposed(), self.amplitude.T.copy(), self.normalization)


def pump_envelope(nu_s, nu_i, sigma1, sigma2):
    """exp[-(nu_s + nu_i)^2 / (sigma1^2 + sigma2^2)]."""
    if not (sigma1 > 0 and sigma2 > 0):
        raise DomainError("pump bandwidths must be > 0")
    s = np.asarray(nu_s) + np.asarray(nu_i)
    return np.exp(-(s * s) / (sigma1 * sigma1 + sigma2 * sigma2))


def pm_degenerate(x):
    """sinc(x/2) exp(i x/2) with sinc(u) = sin(u)/u."""
    x = np.asarray(x, dtype=float)
    out = np.sinc(x / (2 * np.pi)) * np.exp(0.5j * x)
    return complex(out) if out.ndim == 0 else out


def pm_nondegenerate(B, x):
    """Phase-matching function for non-degenerate pumps, peak-normalized.

    Phi(B; x) = M sqrt(pi) B exp(-B^2 x^2) [erf(1/(2B) - i B x) + erf(i B x)]

    evaluated through the Faddeeva function w(z) and Dawson's integral, which
    keeps every intermediate bounded:

    exp(-y^2) erf(a - i y) = exp(-y^2) - exp(-a^2 + 2 i a y) w(y + i a),
    exp(-y^2) erf(i y)     = (2 i / sqrt(pi)) D(y),

    with ``a = 1/(2B)``, ``y = B x``.  ``M`` puts the maximum (at x = 0) at 1.
    """
    B = abs(float(B))
    if not (B > 0 and math.isfinite(B)):
        raise DomainError(f"B must be positive and finite, got {B!r}")
    x = np.asarray(x, dtype=float)
    a = 0.5 / B
    y = B * x
    with np.errstate(over="raise", invalid="raise"):
        try:
            body = (np.exp(-y * y)
                    - np.exp(-a * a + 2j * a * y) * special.wofz(y + 1j * a)
                    + (2j / math.sqrt(math.pi)) * special.dawsn(y))
        except FloatingPointError as exc:
            raise NumericError(f"complex erf evaluation failed for B={B}, |x|<={np.max(np.abs(x))}") from exc
    # sqrt(pi) B and M cancel except for erf(a) from the x = 0 value.
    out = body / math.erf(a)
    return complex(out) if out.ndim == 0 else out


def nondegenerate_B(pump: PumpSpec, tau_p: float) -> float:
    """B = sqrt(sigma1^2 + sigma2^2) / (sigma1 sigma2 |tau_p|)."""
    if tau_p == 0:
        return math.inf
    return math.sqrt(pump.sigma1**2 + pump.sigma2**2) / (pump.sigma1 * pump.sigma2 * abs(tau_p))


def _uses_sinc(pump: PumpSpec, point: PhaseMatchPoint) -> bool:
    return pump.is_degenerate or point.tau_p == 0


def phase_matching_function(pump: PumpSpec, point: PhaseMatchPoint, x):
    if _uses_sinc(pump, point):
        return pm_degenerate(x)
    return pm_nondegenerate(nondegenerate_B(pump, point.tau_p), x)


def _main_lobe_x(pump, point) -> float:
    if _uses_sinc(pump, point):
        return 2 * math.pi
    B = nondegenerate_B(pump, point.tau_p)
    return 2 * math.pi * max(1.0, 0.5 / B)


def default_grid(pump: PumpSpec, point: PhaseMatchPoint, n: int = 512,
                 lobes: float = 1.0, envelope_widths: float = 1.5) -> GridSpec:
    """Window enclosing the main lobe of the joint amplitude.

    The box bounds the parallelogram ``|nu_s + nu_i| <= envelope_widths * S``,
    ``|T_s nu_s + T_i nu_i| <= lobes * X`` where ``S^2 = sigma1^2 + sigma2^2`` and
    ``X`` is the phase-matching main-lobe half-width (2 pi for the sinc).
    """
    S = math.hypot(pump.sigma1, pump.sigma2)
    A = envelope_widths * S
    X = lobes * _main_lobe_x(pump, point)
    ts, ti = point.T_s, point.T_i
    denom = abs(ts - ti)
    if denom < 1e-3 * (abs(ts) + abs(ti)) or denom == 0:
        hw_s = hw_i = 4 * A
    else:
        hw_s = (X + abs(ti) * A) / denom
        hw_i = (X + abs(ts) * A) / denom
    return GridSpec(point.omega_s, point.omega_i, hw_s, hw_i, n, n)


def jsa_linear(fiber, pump: PumpSpec, point: PhaseMatchPoint, grid: GridSpec,
               phase_matching: bool = True) -> SpectralGrid:
    """Closed-form JSA from the linearized phase mismatch about ``point``.

    ``phase_matching=False`` returns the pump envelope alone.
    """
    nu_s = grid.omega_s - point.omega_s
    nu_i = grid.omega_i - point.omega_i
    ns, ni = np.meshgrid(nu_s, nu_i, indexing="ij")
    amp = pump_envelope(ns, ni, pump.sigma1, pump.sigma2).astype(complex)
    if phase_matching:
        x = fiber.length * point.delta_k + point.T_s * ns + point.T_i * ni
        amp = amp * phase_matching_function(pump, point, x)
    return SpectralGrid(grid, amp).normalized()


def _band_interpolant(fiber, axis, lo, hi):
    """Chebyshev interpolant of k(omega) on [lo, hi], checked against the solver."""
    if hi <= lo:
        hi = lo * (1 + 1e-9)
        lo = lo * (1 - 1e-9)

    def kf(w):
        return np.asarray(dispersion.propagation_constant(fiber, axis, np.asarray(w)))

    check = lo + (hi - lo) * (np.arange(7) + 0.37) / 7
    exact = kf(check)
    for deg in (16, 24, 32, 48, 64):
        cheb = Chebyshev.interpolate(kf, deg, domain=[lo, hi])
        if np.max(np.abs(cheb(check) - exact)) <= 1e-13 * np.max(np.abs(exact)):
            return cheb
    raise NumericError("Chebyshev interpolation of k(omega) did not converge on the pump band")


def _quadrature(grid: GridSpec, fiber, pump: PumpSpec, n_nodes: int, interp):
    ws = grid.omega_s
    wi = grid.omega_i
    kp1, kp2 = interp
    ks_s = np.asarray(dispersion.propagation_constant(fiber, pump.sideband_axis, ws))
    ks_i = np.asarray(dispersion.propagation_constant(fiber, pump.sideband_axis, wi))
    s1, s2 = pump.sigma1, pump.sigma2
    S2 = s1 * s1 + s2 * s2
    s_prod = s1 * s2 / math.sqrt(S2)
    big = ws[:, None] + wi[None, :] - pump.omega1 - pump.omega2
    mu = big * (s1 * s1 / S2)
    env = np.exp(-(big * big) / S2)
    ksum = ks_s[:, None] + ks_i[None, :] + pump.power_term(fiber)
    L = fiber.length
    t, wts = np.polynomial.legendre.leggauss(n_nodes)
    t = t * _QUAD_HALF_SPAN
    wts = wts * _QUAD_HALF_SPAN
    acc = np.zeros(big.shape, dtype=complex)
    for tj, wj in zip(t, wts):
        nu1 = mu + s_prod * tj
        w1 = pump.omega1 + nu1
        w2 = pump.omega2 + big - nu1
        dk = kp1(w1) + kp2(w2) - ksum
        x = L * dk
        acc += (wj * math.exp(-tj * tj)) * np.sinc(x / (2 * np.pi)) * np.exp(0.5j * x)
    return env * acc


def jsa_full(fiber, pump: PumpSpec, grid: GridSpec, n_nodes: int = 32, tol: float = 1e-6,
             max_nodes: int = 1024) -> SpectralGrid:
    """JSA by Gauss-Legendre quadrature of the full pump-convolution integral.

    For each (omega_s, omega_i) the product of the two Gaussian pump amplitudes
    is a Gaussian in the pump-1 frequency; the nodes are placed on +-6 of its
    1/e half-widths about its mean.  The node count is doubled until the grid
    changes by less than ``tol`` of its peak.
    """
    s1, s2 = pump.sigma1, pump.sigma2
    S2 = s1 * s1 + s2 * s2
    s_prod = s1 * s2 / math.sqrt(S2)
    big_lo = grid.center_s + grid.center_i - grid.half_width_s - grid.half_width_i
    big_hi = grid.center_s + grid.center_i + grid.half_width_s + grid.half_width_i
    big_lo -= pump.omega1 + pump.omega2
    big_hi -= pump.omega1 + pump.omega2
    pad = _QUAD_HALF_SPAN * s_prod
    band1 = (pump.omega1 + min(big_lo, 0) * s1 * s1 / S2 - pad,
             pump.omega1 + max(big_hi, 0) * s1 * s1 / S2 + pad)
    band2 = (pump.omega2 + min(big_lo, 0) * s2 * s2 / S2 - pad,
             pump.omega2 + max(big_hi, 0) * s2 * s2 / S2 + pad)
    ax = pump.pump_axis
    if pump.is_degenerate:
        lo, hi = min(band1[0], band2[0]), max(band1[1], band2[1])
        k1 = _band_interpolant(fiber, ax, lo, hi)
        interp = (k1, k1)
    else:
        interp = (_band_interpolant(fiber, ax, *band1), _band_interpolant(fiber, ax, *band2))

    prev = _quadrature(grid, fiber, pump, n_nodes, interp)
    n = n_nodes
    while True:
        n *= 2
        if n > max_nodes:
            raise NumericError(f"JSA quadrature not converged with {max_nodes} nodes")
        cur = _quadrature(grid, fiber, pump, n, interp)
        peak = np.max(np.abs(cur))
        if peak == 0:
            raise NumericError("JSA quadrature returned an all-zero grid")
        if np.max(np.abs(cur - prev)) < tol * peak:
            break
        prev = cur
    return SpectralGrid(grid, cur).normalized()


def apply_filters(grid: SpectralGrid, filter_s: FilterSpec, filter_i: FilterSpec):
    """Zero the amplitude outside both rectangular passbands.

    Returns the re-normalized grid and the retained flux fraction.
    """
    ms = filter_s.mask(grid.spec.omega_s)
    mi = filter_i.mask(grid.spec.omega_i)
    if not ms.any() or not mi.any():
        raise ValueError("filter passbands do not overlap the grid")
    amp = grid.amplitude * (ms[:, None] & mi[None, :])
    total = np.sum(np.abs(grid.amplitude) ** 2)
    kept = np.sum(np.abs(amp) ** 2)
    if kept == 0:
        raise ValueError("filtered grid carries no amplitude")
    filtered = SpectralGrid(grid.spec, amp, grid.normalization).normalized()
    return filtered, float(kept / total)


def rms_intensity_difference(a: SpectralGrid, b: SpectralGrid) -> float:
    """RMS difference of the two peak-normalized intensities (fraction of peak)."""
    if a.spec != b.spec:
        raise ValueError("grids differ")
    ia = a.intensity() / np.max(a.intensity())
    ib = b.intensity() / np.max(b.intensity())
    return float(np.sqrt(np.mean((ia - ib) ** 2)))
