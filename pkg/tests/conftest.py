import math

import numpy as np
import pytest
from scipy.linalg import expm

from tricav import PhysicalParams, symplectic_form

TWO_PI = 2 * math.pi
OMEGA_M = TWO_PI * 1e7


@pytest.fixture
def reference_params():
    """Cooling working point of the reference experiment, no atoms, Delta_f unset."""
    return PhysicalParams(
        omega_m=OMEGA_M,
        quality_factor=1e5,
        mass=1e-11,
        cavity_length=1e-3,
        finesse=3e4,
        laser_wavelength=1064e-9,
        laser_power=0.035,
        detuning_f=0.0,
        atom_coupling=0.0,
        atom_linewidth=TWO_PI * 5e6,
        detuning_a=-OMEGA_M,
        temperature=0.6,
    )


def two_mode_squeezed(r):
    ch, sh = math.cosh(2 * r) / 2, math.sinh(2 * r) / 2
    V = np.zeros((4, 4))
    V[:2, :2] = V[2:, 2:] = ch * np.eye(2)
    V[:2, 2:] = V[2:, :2] = sh * np.diag([1.0, -1.0])
    return V


def random_symplectic(rng, n_modes, strength=0.5):
    H = rng.normal(size=(2 * n_modes, 2 * n_modes)) * strength
    H = (H + H.T) / 2
    return expm(symplectic_form(n_modes) @ H)


def random_physical_cm(rng, n_modes, strength=0.5):
    """S diag(nu) S^T with random symplectic S and nu >= 1/2."""
    nu = 0.5 + rng.exponential(0.5, size=n_modes)
    S = random_symplectic(rng, n_modes, strength)
    V = S @ np.diag(np.repeat(nu, 2)) @ S.T
    return (V + V.T) / 2, np.sort(nu)


def rotation(n_modes, mode, theta):
    R = np.eye(2 * n_modes)
    c, s = math.cos(theta), math.sin(theta)
    R[2 * mode:2 * mode + 2, 2 * mode:2 * mode + 2] = [[c, -s], [s, c]]
    return R


@pytest.fixture(scope="session")
def acceptance_log(request):
    lines = []
    request.config._acceptance_lines = lines
    return lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
