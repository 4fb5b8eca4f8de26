"""Photon-pair design toolkit for four-wave mixing in photonic-crystal fiber.

The modules build on each other bottom-up:

* :mod:`pcfsfwm.dispersion` -- step-index PCF mode solver and dispersion
* :mod:`pcfsfwm.phasematch` -- phase mismatch, sideband roots, GVM contours
* :mod:`pcfsfwm.jsa` -- joint spectral amplitude (analytic and quadrature)
* :mod:`pcfsfwm.schmidt` -- Schmidt spectrum and heralded purity
* :mod:`pcfsfwm.design` -- factorable / asymmetric / broadband design search
* :mod:`pcfsfwm.cli` -- JSON-configured command line front end
"""

from pcfsfwm.errors import (
    DomainError,
    ModeCutoffError,
    NotFoundError,
    NumericError,
)
from pcfsfwm.dispersion import (
    FiberAxis,
    FiberSpec,
    beta_derivatives,
    birefringence,
    cladding_index,
    effective_index,
    propagation_constant,
    silica_index,
    zero_dispersion_wavelengths,
)
from pcfsfwm.phasematch import (
    Contour,
    GVMKind,
    PhaseMatchPoint,
    Process,
    PumpSpec,
    gvm_coefficients,
    gvm_contour,
    orientation_angle,
    phase_mismatch,
    solve_sidebands,
    trace_phasematch_contour,
)
from pcfsfwm.jsa import (
    FilterSpec,
    GridSpec,
    SpectralGrid,
    apply_filters,
    jsa_full,
    jsa_linear,
    pm_degenerate,
    pm_nondegenerate,
    pump_envelope,
)
from pcfsfwm.schmidt import (
    PurityReport,
    SchmidtSpectrum,
    converged_purity,
    filtered_purity,
    purity,
    schmidt_decompose,
)

from pcfsfwm.design import (
    GAMMA,
    DesignKind,
    DesignPoint,
    birefringence_sweep,
    factorable_possible,
    find_asymmetric_points,
    find_symmetric_point,
    symmetric_bandwidth,
    ultra_broadband_point,
)

__version__ = "0.1.0"
