"""Shared fixtures: reference fiber and pump configurations, built once per session."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.constants import c

from pcfsfwm import FiberSpec, Process, PumpSpec, jsa, solve_sidebands
from pcfsfwm.dispersion import wavelength_to_omega

ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"{criterion}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def sigma_from_nm(bandwidth_nm, wavelength_nm):
    """Bandwidth convention used throughout: the quoted width in rad/s is sigma."""
    return 2 * math.pi * c * bandwidth_nm * 1e-9 / (wavelength_nm * 1e-9) ** 2


def outer_point(fiber, pump):
    return max((p for p in solve_sidebands(fiber, pump) if not p.trivial),
               key=lambda p: p.detuning)


@pytest.fixture(scope="session")
def sym_fiber():
    return FiberSpec(core_radius=0.616e-6, air_fill=0.6, length=0.25, gamma=0.07)


@pytest.fixture(scope="session")
def sym_pump():
    return PumpSpec.degenerate(wavelength_to_omega(714.7e-9), sigma_from_nm(0.1, 714.7), power=30.0)


@pytest.fixture(scope="session")
def sym_point(sym_fiber, sym_pump):
    return outer_point(sym_fiber, sym_pump)


@pytest.fixture(scope="session")
def sym_grids(sym_fiber, sym_pump, sym_point):
    g = jsa.default_grid(sym_pump, sym_point, 512)
    return (jsa.jsa_linear(sym_fiber, sym_pump, sym_point, g),
            jsa.jsa_full(sym_fiber, sym_pump, g))


@pytest.fixture(scope="session")
def nd_fiber():
    return FiberSpec(core_radius=0.601e-6, air_fill=0.522, length=0.25)


@pytest.fixture(scope="session")
def nd_pump():
    return PumpSpec(wavelength_to_omega(625e-9), wavelength_to_omega(1250e-9),
                    sigma_from_nm(1.51, 625), sigma_from_nm(0.12, 1250),
                    process=Process.CO_POL_NONDEGENERATE)


@pytest.fixture(scope="session")
def nd_point(nd_fiber, nd_pump):
    return outer_point(nd_fiber, nd_pump)


@pytest.fixture(scope="session")
def nd_grids(nd_fiber, nd_pump, nd_point):
    g = jsa.default_grid(nd_pump, nd_point, 512)
    return (jsa.jsa_linear(nd_fiber, nd_pump, nd_point, g),
            jsa.jsa_full(nd_fiber, nd_pump, g))


@pytest.fixture(scope="session")
def biref_base():
    return FiberSpec(core_radius=0.875e-6, air_fill=0.43, length=30.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
