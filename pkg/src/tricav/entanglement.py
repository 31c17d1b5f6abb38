"""Gaussian-state entanglement measures for the mirror / cavity / atoms system.

Covariance matrices use (q, p) interleaved ordering per mode and the
convention where the vacuum is ``I / 2``. Logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from .errors import NumericalError

MODES = ("mirror", "cavity", "atoms")
PHYSICAL_TOL = 1e-9
CLAMP_FLOOR = 1e-9
CROSS_CHECK_TOL = 1e-8

ModeLike = Union[int, str]


def _mode_index(mode: ModeLike, n_modes: int = 3) -> int:
    if isinstance(mode, str):
        try:
            mode = MODES.index(mode)
        except ValueError:
            raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}") from None
    mode = int(mode)
    if not 0 <= mode < n_modes:
        raise ValueError(f"mode index {mode} out of range for {n_modes} modes")
    return mode


def _as_cm(V) -> np.ndarray:
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != V.shape[1] or V.shape[0] % 2:
        raise ValueError(f"covariance matrix must be 2n x 2n, got shape {V.shape}")
    return V


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def reduce(V, modes: Iterable[ModeLike]) -> np.ndarray:
    """Covariance matrix of a subset of modes (Gaussian partial trace).

    Modes are kept in (mirror, cavity, atoms) order whatever the order given.
    """
    V = _as_cm(V)
    n = V.shape[0] // 2
    idx = sorted({_mode_index(m, n) for m in modes})
    if not idx:
        raise ValueError("at least one mode must be kept")
    rows = [r for k in idx for r in (2 * k, 2 * k + 1)]
    return V[np.ix_(rows, rows)].copy()


def _spectrum(V):
    n = V.shape[0] // 2
    nu = np.sort(np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ V)))
    # each value appears twice (+nu, -nu)
    return nu.reshape(n, 2).mean(axis=1)


def symplectic_eigenvalues(V) -> np.ndarray:
    """Williamson spectrum of ``V`` in ascending order (one value per mode)."""
    V = _as_cm(V)
    scale = max(np.max(np.abs(V)), 1.0)
    if not np.allclose(V, V.T, rtol=0, atol=1e-10 * scale):
        raise ValueError("covariance matrix is not symmetric")
    try:
        np.linalg.cholesky((V + V.T) / 2)
    except np.linalg.LinAlgError:
        raise ValueError("covariance matrix is not positive definite") from None
    return _spectrum(V)


def partial_transpose(V, mode: ModeLike) -> np.ndarray:
    """Flip the sign of one mode's momentum quadrature (transposition on that mode)."""
    V = _as_cm(V)
    k = _mode_index(mode, V.shape[0] // 2)
    sign = np.ones(V.shape[0])
    sign[2 * k + 1] = -1.0
    return V * np.outer(sign, sign)


def _require_physical(V):
    nu = symplectic_eigenvalues(V)
    if nu[0] < 0.5 - PHYSICAL_TOL:
        raise ValueError(f"unphysical covariance matrix: minimum symplectic eigenvalue {nu[0]:.12g} < 1/2")
    return nu


def _negativity_from_nu(nu_min):
    value = -math.log(2 * nu_min)
    return value if value > CLAMP_FLOOR else 0.0


def _eta_minus_blocks(V4):
    a, b, c = V4[:2, :2], V4[2:, 2:], V4[:2, 2:]
    sigma = np.linalg.det(a) + np.linalg.det(b) - 2 * np.linalg.det(c)
    disc = max(sigma**2 - 4 * np.linalg.det(V4), 0.0)
    return math.sqrt(max(sigma - math.sqrt(disc), 0.0) / 2)


def min_pt_eigenvalue(V, mode: ModeLike) -> float:
    """Smallest symplectic eigenvalue of the partial transpose on ``mode``."""
    return float(_spectrum(partial_transpose(V, mode))[0])


def log_negativity_2mode(V4) -> float:
    """Logarithmic negativity of a two-mode Gaussian state.

    Computed from the block invariants and, independently, from the
    partially transposed symplectic spectrum; the two must agree.
    """
    V4 = _as_cm(V4)
    if V4.shape != (4, 4):
        raise ValueError(f"expected a 4x4 covariance matrix, got {V4.shape}")
    _require_physical(V4)
    eta_blocks = _eta_minus_blocks(V4)
    eta_pt = min_pt_eigenvalue(V4, 1)
    if abs(eta_blocks - eta_pt) > CROSS_CHECK_TOL * max(1.0, eta_pt):
        raise NumericalError(f"negativity paths disagree: {eta_blocks!r} vs {eta_pt!r}")
    if eta_pt >= 0.5:
        return 0.0
    return _negativity_from_nu(eta_pt)


def log_negativity_1v2(V6, mode: ModeLike) -> float:
    """Negativity of one mode against the other two."""
    V6 = _as_cm(V6)
    _require_physical(V6)
    nu = min_pt_eigenvalue(V6, mode)
    return 0.0 if nu >= 0.5 else _negativity_from_nu(nu)


@dataclass(frozen=True)
class TripartiteClass:
    """Entanglement class of a three-mode Gaussian state from its 1|2 cuts.

    ``pt_eigenvalues`` holds the minimum partially transposed symplectic
    eigenvalue for the cuts mirror|rest, cavity|rest, atoms|rest.
    """

    label: str
    pt_eigenvalues: tuple
    mode: Optional[str] = None

    def __str__(self):
        return f"{self.label}[{self.mode}]" if self.mode else self.label


def tripartite_class(V6, tol: float = PHYSICAL_TOL) -> TripartiteClass:
    V6 = _as_cm(V6)
    if V6.shape != (6, 6):
        raise ValueError(f"expected a 6x6 covariance matrix, got {V6.shape}")
    _require_physical(V6)
    nus = tuple(min_pt_eigenvalue(V6, k) for k in range(3))
    separable = [nu >= 0.5 - tol for nu in nus]
    count = sum(separable)
    if count == 0:
        return TripartiteClass("fully_inseparable", nus)
    if count == 1:
        return TripartiteClass("one_mode_biseparable", nus, MODES[separable.index(True)])
    if count == 2:
        return TripartiteClass("two_mode_biseparable", nus)
    return TripartiteClass("not_class_1_3", nus)


def effective_occupation(V6) -> float:
    """Mean phonon number of the mirror inferred from its reduced covariance matrix."""
    V6 = _as_cm(V6)
    n_eff = (V6[0, 0] + V6[1, 1] - 1.0) / 2
    if -CLAMP_FLOOR < n_eff < CLAMP_FLOOR:
        return 0.0
    return float(n_eff)


@dataclass(frozen=True)
class EntanglementReport:
    E_mf: float
    E_ma: float
    E_af: float
    n_eff: float
    tripartite: TripartiteClass
    stable: bool = True
    max_real_part: Optional[float] = None

    def as_dict(self) -> dict:
        return {
            "E_mf": self.E_mf,
            "E_ma": self.E_ma,
            "E_af": self.E_af,
            "n_eff": self.n_eff,
            "class": str(self.tripartite),
            "pt_eigenvalues": list(self.tripartite.pt_eigenvalues),
            "stable": self.stable,
            "max_real_part": self.max_real_part,
        }


def report(V6, stability=None) -> EntanglementReport:
    """All measures for one steady state; ``stability`` is an ``is_stable`` result."""
    V6 = _as_cm(V6)
    _require_physical(V6)
    return EntanglementReport(
        E_mf=log_negativity_2mode(reduce(V6, ("mirror", "cavity"))),
        E_ma=log_negativity_2mode(reduce(V6, ("mirror", "atoms"))),
        E_af=log_negativity_2mode(reduce(V6, ("cavity", "atoms"))),
        n_eff=effective_occupation(V6),
        tripartite=tripartite_class(V6),
        stable=True if stability is None else bool(stability.stable),
        max_real_part=None if stability is None else float(stability.max_real_part),
    )
