"""Schmidt decomposition and heralded-photon purity of a joint spectral amplitude."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from pcfsfwm.errors import NumericError
from pcfsfwm.jsa import FilterSpec, GridSpec, SpectralGrid, apply_filters

CONVERGENCE_TOL = 1e-3


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Schmidt eigenvalues, descending and summing to one."""

    eigenvalues: np.ndarray

    @property
    def count(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def purity(self) -> float:
        return float(np.sum(self.eigenvalues**2))

    @property
    def schmidt_number(self) -> float:
        return 1.0 / self.purity


@dataclass(frozen=True)
class PurityReport:
    purity: float
    schmidt_number: float
    flux_fraction: float = 1.0
    resolution: tuple[int, int] | None = None
    convergence_delta: float | None = None

    def as_dict(self) -> dict:
        d = asdict(self)
        if d["resolution"] is not None:
            d["resolution"] = list(d["resolution"])
        return d


def schmidt_decompose(grid: SpectralGrid) -> SchmidtSpectrum:
    """Schmidt spectrum from the SVD of the quadrature-weighted amplitude matrix."""
    amp = np.asarray(grid.amplitude)
    if not np.any(amp):
        raise ValueError("cannot decompose an all-zero grid")
    weighted = amp * np.sqrt(grid.spec.d_omega_s * grid.spec.d_omega_i)
    s = np.linalg.svd(weighted, compute_uv=False)
    lam = s * s
    lam = lam / np.sum(lam)
    return SchmidtSpectrum(np.sort(lam)[::-1])


def purity(grid: SpectralGrid) -> float:
    """Heralded purity Tr[rho_s^2] = sum lambda_n^2."""
    return schmidt_decompose(grid).purity


def report(grid: SpectralGrid, flux_fraction: float = 1.0,
           convergence_delta: float | None = None) -> PurityReport:
    spec = schmidt_decompose(grid)
    p = spec.purity
    return PurityReport(p, 1.0 / p, flux_fraction, (grid.spec.n_s, grid.spec.n_i),
                        convergence_delta)


def filtered_purity(grid: SpectralGrid, filter_s: FilterSpec, filter_i: FilterSpec) -> PurityReport:
    filtered, flux = apply_filters(grid, filter_s, filter_i)
    return report(filtered, flux_fraction=flux)


def converged_purities(build: Callable[[GridSpec], SpectralGrid], grid: GridSpec,
                       filter_sets: Sequence[tuple[FilterSpec, FilterSpec] | None] = (None,),
                       tol: float = CONVERGENCE_TOL, max_doublings: int = 2) -> list[PurityReport]:
    """Purities accepted once doubling both grid dimensions moves each by < ``tol``.

    ``build`` maps a grid spec to a JSA; each JSA is shared by all entries of
    ``filter_sets`` (``None`` meaning unfiltered).  Reports are for the finer
    of the last two grids and carry the observed delta.  Raises
    :class:`NumericError` if any delta is still above ``tol`` after
    ``max_doublings`` refinements.
    """

    def evaluate(g):
        jsa = build(g)
        return [report(jsa) if f is None else filtered_purity(jsa, *f) for f in filter_sets]

    prev = evaluate(grid)
    g = grid
    for _ in range(max_doublings):
        g = g.resized(2 * g.n_s, 2 * g.n_i)
        cur = evaluate(g)
        deltas = [abs(a.purity - b.purity) for a, b in zip(cur, prev)]
        if max(deltas) < tol:
            return [PurityReport(r.purity, r.schmidt_number, r.flux_fraction, r.resolution, d)
                    for r, d in zip(cur, deltas)]
        prev = cur
    raise NumericError(f"purity not converged under grid doubling (last delta {max(deltas):.3g})")


def converged_purity(build: Callable[[GridSpec], SpectralGrid], grid: GridSpec,
                     filters: tuple[FilterSpec, FilterSpec] | None = None,
                     tol: float = CONVERGENCE_TOL, max_doublings: int = 2) -> PurityReport:
    """Single-report form of :func:`converged_purities`."""
    return converged_purities(build, grid, (filters,), tol, max_doublings)[0]
