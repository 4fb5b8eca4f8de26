"""Fundamental-mode dispersion of a photonic-crystal fiber.

The fiber is modeled as a two-layer step-index guide: a fused-silica core of
radius ``r`` and a homogenized cladding whose index is the air-filling-fraction
weighted average ``n_clad = f + (1 - f) n_s``.  The HE11 propagation constant is
obtained from the exact vectorial characteristic equation (Bessel ``J`` in the
core, modified Bessel ``K`` in the cladding).

Birefringence is represented by treating the two polarization axes as two
separate fibers whose core diameters differ by ``delta_d``.

All quantities are SI: angular frequency in rad/s, lengths in m, ``k`` in rad/m
and ``k_n = d^n k / d omega^n`` in s^n/m.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import special
from scipy.constants import c
from scipy.optimize import brentq

from pcfsfwm.errors import DomainError, ModeCutoffError

# Malitson (1965) fused silica, wavelengths in micrometres.
_SELLMEIER_B = (0.6961663, 0.4079426, 0.8974794)
_SELLMEIER_C = (0.0684043, 0.1162414, 9.896161)
SELLMEIER_WINDOW_UM = (0.21, 3.71)

AIR_FILL_VALID = (0.1, 0.9)

# First zero of J1; the HE11 root always lies below it.
_J1_ZERO = 3.8317059702075125

# Relative finite-difference base step per derivative order.  k4 needs a much
# larger step than k1 to stay above the solver's round-off floor.
_REL_STEP = {1: 2e-3, 2: 4e-3, 3: 8e-3, 4: 1.6e-2}


class ModelValidityWarning(UserWarning):
    """Issued when a fiber lies outside the step-index model's validated range."""


class FiberAxis(enum.Enum):
    X = "x"
    Y = "y"


@dataclass(frozen=True)
class FiberSpec:
    """Step-index PCF geometry plus the two parameters SFWM needs.

    Parameters
    ----------
    core_radius : float
        Core radius ``r`` in m (axis X uses diameter ``2r``).
    air_fill : float
        Air-filling fraction ``f`` of the cladding.
    delta_d : float
        Core-diameter offset of axis Y in m (axis Y diameter is ``2r + delta_d``).
    length : float
        Fiber length ``L`` in m.
    gamma : float
        Nonlinear parameter in 1/(W m).
    """

    core_radius: float
    air_fill: float
    delta_d: float = 0.0
    length: float = 1.0
    gamma: float = 0.0

    def __post_init__(self):
        if not self.core_radius > 0:
            raise DomainError(f"core_radius must be > 0, got {self.core_radius!r}")
        if not 0.0 < self.air_fill < 1.0:
            raise DomainError(f"air_fill must lie in (0, 1), got {self.air_fill!r}")
        if not self.length > 0:
            raise DomainError(f"length must be > 0, got {self.length!r}")
        if self.gamma < 0:
            raise DomainError(f"gamma must be >= 0, got {self.gamma!r}")
        if abs(self.delta_d) >= 0.2 * self.core_radius:
            raise DomainError("|delta_d| must be small compared with the core diameter")
        lo, hi = AIR_FILL_VALID
        if not lo <= self.air_fill <= hi:
            warnings.warn(
                f"air_fill={self.air_fill} is outside the validated range [{lo}, {hi}]",
                ModelValidityWarning,
                stacklevel=3,
            )

    @property
    def core_diameter(self) -> float:
        return 2.0 * self.core_radius

    def axis_radius(self, axis: FiberAxis) -> float:
        if axis is FiberAxis.Y:
            return self.core_radius + 0.5 * self.delta_d
        return self.core_radius

    def with_(self, **changes) -> "FiberSpec":
        return replace(self, **changes)


@dataclass(frozen=True)
class DispersionSample:
    omega: np.ndarray
    n_eff: np.ndarray
    k: np.ndarray
    k1: np.ndarray | None = None
    k2: np.ndarray | None = None
    k3: np.ndarray | None = None
    k4: np.ndarray | None = None

    def order(self, n: int) -> np.ndarray:
        return (self.k, self.k1, self.k2, self.k3, self.k4)[n]


def omega_window() -> tuple[float, float]:
    """Angular-frequency range covered by the silica Sellmeier fit."""
    lo_um, hi_um = SELLMEIER_WINDOW_UM
    return 2 * np.pi * c / (hi_um * 1e-6), 2 * np.pi * c / (lo_um * 1e-6)


def wavelength_to_omega(wavelength):
    return 2 * np.pi * c / np.asarray(wavelength, dtype=float)


def omega_to_wavelength(omega):
    return 2 * np.pi * c / np.asarray(omega, dtype=float)


def _check_window(omega: np.ndarray) -> None:
    lo, hi = omega_window()
    if np.any(~np.isfinite(omega)) or np.any(omega < lo) or np.any(omega > hi):
        bad = omega[(omega < lo) | (omega > hi) | ~np.isfinite(omega)]
        lam = 2 * np.pi * c / bad[0] * 1e6 if bad[0] else np.inf
        raise DomainError(
            f"wavelength {lam:.6g} um outside the silica dispersion window "
            f"{SELLMEIER_WINDOW_UM[0]}-{SELLMEIER_WINDOW_UM[1]} um"
        )


def _scalar_or_array(x, template):
    return float(x) if np.ndim(template) == 0 else x


def silica_index(omega):
    """Refractive index of fused silica (three-term Sellmeier)."""
    om = np.asarray(omega, dtype=float)
    _check_window(np.atleast_1d(om))
    lam2 = (2 * np.pi * c / om * 1e6) ** 2
    total = 1.0
    for b, cc in zip(_SELLMEIER_B, _SELLMEIER_C):
        total = total + b * lam2 / (lam2 - cc * cc)
    return _scalar_or_array(np.sqrt(total), omega)


def cladding_index(omega, air_fill):
    if not 0.0 <= air_fill <= 1.0:
        raise DomainError(f"air_fill must lie in [0, 1], got {air_fill!r}")
    ns = np.asarray(silica_index(omega))
    return _scalar_or_array(air_fill + (1.0 - air_fill) * ns, omega)


def _he11_residual(u, v, r):
    """HE11 characteristic function; positive below the root, negative above.

    ``r`` is (n_clad / n_core)^2.  Scaled K functions keep large ``w`` finite.
    """
    w = np.sqrt(np.maximum(v * v - u * u, 1e-300))
    kt = -special.k0e(w) / (special.k1e(w) * w) - 1.0 / (w * w)
    jt = special.j0(u) / (u * special.j1(u)) - 1.0 / (u * u)
    iu2 = 1.0 / (u * u)
    iw2 = 1.0 / (w * w)
    rad = np.sqrt((0.5 * (1.0 - r) * kt) ** 2 + (iu2 + iw2) * (iu2 + r * iw2))
    return jt + 0.5 * (1.0 + r) * kt + rad


def _solve_u(v, r, omega, n_scan=48, max_iter=200):
    """Vectorized bracket-and-refine for the HE11 transverse parameter u."""
    u_top = np.minimum(v, _J1_ZERO) * (1.0 - 1e-13)
    u_bot = u_top * 1e-6
    frac = np.linspace(0.0, 1.0, n_scan)
    grid = u_bot[:, None] + (u_top - u_bot)[:, None] * frac[None, :]
    vals = _he11_residual(grid, v[:, None], r[:, None])
    neg = vals <= 0
    has = neg.any(axis=1)
    if not has.all():
        i = int(np.argmin(has))
        raise ModeCutoffError(float(omega[i]), (float(u_bot[i]), float(u_top[i])))
    first = np.argmax(neg, axis=1)
    if np.any(first == 0):
        i = int(np.argmax(first == 0))
        raise ModeCutoffError(float(omega[i]), (float(u_bot[i]), float(u_top[i])))
    rows = np.arange(len(v))
    lo, hi = grid[rows, first - 1], grid[rows, first]
    flo, fhi = vals[rows, first - 1], vals[rows, first]

    # Illinois false position; keeps the bracket so it cannot escape the root.
    side = np.zeros(len(v), dtype=int)
    for _ in range(max_iter):
        width = hi - lo
        done = width <= 4 * np.finfo(float).eps * hi
        if done.all():
            break
        x = np.where(done, lo, (lo * fhi - hi * flo) / (fhi - flo))
        x = np.clip(x, lo, hi)
        # Fall back to bisection when false position stalls on an endpoint.
        stuck = (x <= lo) | (x >= hi)
        x = np.where(stuck, 0.5 * (lo + hi), x)
        fx = _he11_residual(x, v, r)
        pos = fx > 0
        zero = fx == 0
        lo_new = np.where(pos & ~done, x, lo)
        hi_new = np.where(~pos & ~done, x, hi)
        hi_new = np.where(zero & ~done, x, hi_new)
        lo_new = np.where(zero & ~done, x, lo_new)
        flo_new = np.where(pos & ~done, fx, flo)
        fhi_new = np.where(~pos & ~done, fx, fhi)
        # Illinois: halve the retained end's value when the same side repeats.
        moved = np.where(pos, 1, -1)
        rep_lo = (moved == -1) & (side == -1) & ~done
        rep_hi = (moved == 1) & (side == 1) & ~done
        flo_new = np.where(rep_lo, 0.5 * flo_new, flo_new)
        fhi_new = np.where(rep_hi, 0.5 * fhi_new, fhi_new)
        side = np.where(done, side, moved)
        lo, hi, flo, fhi = lo_new, hi_new, flo_new, fhi_new
    return 0.5 * (lo + hi)


def _neff_radius(radius, air_fill, omega):
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    n1 = np.atleast_1d(silica_index(om))
    n2 = air_fill + (1.0 - air_fill) * n1
    k0 = om / c
    v = radius * k0 * np.sqrt(n1 * n1 - n2 * n2)
    r = (n2 / n1) ** 2
    u = _solve_u(v, r, om)
    return np.sqrt(n1 * n1 - (u / (radius * k0)) ** 2)


def effective_index(fiber: FiberSpec, axis: FiberAxis, omega):
    """Effective index of the HE11 mode on one fiber axis."""
    n = _neff_radius(fiber.axis_radius(axis), fiber.air_fill, omega)
    return _scalar_or_array(n.reshape(np.shape(omega)), omega)


def propagation_constant(fiber: FiberSpec, axis: FiberAxis, omega):
    """k(omega) = n_eff omega / c."""
    om = np.asarray(omega, dtype=float)
    n = _neff_radius(fiber.axis_radius(axis), fiber.air_fill, om).reshape(om.shape)
    return _scalar_or_array(n * om / c, omega)


def _stencil(kf, om, h, order):
    """Five-point central difference of ``order`` at step ``h``."""
    fm2, fm1, f0, fp1, fp2 = (kf(om + j * h) for j in (-2, -1, 0, 1, 2))
    if order == 1:
        return (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
    if order == 2:
        return (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h**2)
    if order == 3:
        return (-fm2 + 2 * fm1 - 2 * fp1 + fp2) / (2 * h**3)
    return (fm2 - 4 * fm1 + 6 * f0 - 4 * fp1 + fp2) / h**4


# Truncation order of each stencil, used by the Richardson step.
_STENCIL_ORDER = {1: 4, 2: 4, 3: 2, 4: 2}


def derivative(fiber: FiberSpec, axis: FiberAxis, omega, order: int, step_scale: float = 1.0):
    """d^n k / d omega^n by Richardson-extrapolated five-point differences."""
    if order not in _STENCIL_ORDER:
        raise ValueError(f"order must be 1..4, got {order}")
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    h = _REL_STEP[order] * step_scale * om
    lo, hi = omega_window()
    if np.any(om - 2 * h < lo) or np.any(om + 2 * h > hi):
        raise DomainError(
            "finite-difference stencil leaves the silica dispersion window "
            f"{SELLMEIER_WINDOW_UM[0]}-{SELLMEIER_WINDOW_UM[1]} um"
        )
    radius = fiber.axis_radius(axis)

    def kf(w):
        return _neff_radius(radius, fiber.air_fill, w) * w / c

    coarse = _stencil(kf, om, h, order)
    fine = _stencil(kf, om, 0.5 * h, order)
    p = 2 ** _STENCIL_ORDER[order]
    out = fine + (fine - coarse) / (p - 1)
    return _scalar_or_array(out.reshape(np.shape(omega)), omega)


def beta_derivatives(fiber: FiberSpec, axis: FiberAxis, omega, max_order: int = 4,
                     step_scale: float = 1.0) -> DispersionSample:
    """Propagation constant and its first ``max_order`` frequency derivatives."""
    if not 1 <= max_order <= 4:
        raise ValueError(f"max_order must be 1..4, got {max_order}")
    om = np.asarray(omega, dtype=float)
    n = effective_index(fiber, axis, om)
    ks = {
        f"k{j}": derivative(fiber, axis, om, j, step_scale) for j in range(1, max_order + 1)
    }
    return DispersionSample(omega=om, n_eff=n, k=np.asarray(n) * om / c, **ks)


def group_delay(fiber: FiberSpec, axis: FiberAxis, omega):
    """k1 = d k / d omega (inverse group velocity), s/m."""
    return derivative(fiber, axis, omega, 1)


def zero_dispersion_wavelengths(fiber: FiberSpec, axis: FiberAxis = FiberAxis.X,
                                window=(0.4e-6, 1.8e-6), n_scan: int = 400,
                                tol: float = 1e-14) -> list[float]:
    """Wavelengths (m) where k2 changes sign, refined by bisection to ``tol``."""
    lam = np.linspace(window[0], window[1], n_scan)
    k2 = np.asarray(derivative(fiber, axis, wavelength_to_omega(lam), 2))
    out = []
    for i in np.nonzero(np.sign(k2[:-1]) != np.sign(k2[1:]))[0]:
        a, b = lam[i], lam[i + 1]
        fa = k2[i]
        while b - a > tol:
            m = 0.5 * (a + b)
            fm = derivative(fiber, axis, wavelength_to_omega(m), 2)
            if np.sign(fm) == np.sign(fa):
                a, fa = m, fm
            else:
                b = m
        out.append(0.5 * (a + b))
    return out


def birefringence(fiber: FiberSpec, omega):
    """Delta n = n_y - n_x at ``omega``."""
    if fiber.delta_d == 0:
        n = np.asarray(effective_index(fiber, FiberAxis.X, omega))
        return _scalar_or_array(np.zeros_like(n), omega)
    ny = np.asarray(effective_index(fiber, FiberAxis.Y, omega))
    nx = np.asarray(effective_index(fiber, FiberAxis.X, omega))
    return _scalar_or_array(ny - nx, omega)


def delta_d_for_birefringence(fiber: FiberSpec, delta_n: float, wavelength: float = 800e-9,
                              bracket: float | None = None) -> float:
    """Core-diameter offset that produces ``delta_n`` at ``wavelength``."""
    if delta_n == 0:
        return 0.0
    om = float(wavelength_to_omega(wavelength))
    span = bracket if bracket is not None else 0.1 * fiber.core_radius

    def resid(dd):
        return birefringence(fiber.with_(delta_d=dd), om) - delta_n

    return brentq(resid, -span, span, xtol=1e-18, rtol=1e-13)
