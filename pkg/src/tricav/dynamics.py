"""Stability of the linearized dynamics and its steady-state covariance matrix.

The steady state of ``du/dt = A u + noise`` with diffusion matrix ``D`` is the
unique solution of the continuous Lyapunov equation ``A V + V A^T = -D``
whenever ``A`` is Hurwitz. :func:`solve_lyapunov` solves it directly as a
dense linear system; :func:`integrate_covariance` propagates the matrix ODE
``dV/dt = A V + V A^T + D`` and serves as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InvalidParameterError, NumericalError, UnstableSystemError

STABILITY_EPS = 1e-9
CONDITION_LIMIT = 1e12
QUADRATURES = ("q", "p", "X", "Y", "x", "y")


class StabilityInfo(NamedTuple):
    stable: bool
    max_real_part: float


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Symmetric covariance matrix of quadrature fluctuations.

    Ordering is (q, p) of the mirror, (X, Y) of the cavity field, (x, y) of
    the atoms; vacuum has variance 1/2 in every quadrature.
    """

    entries: np.ndarray
    residual: float = 0.0
    condition: float = 1.0
    ill_conditioned: bool = False

    def __post_init__(self):
        V = np.array(self.entries, dtype=float)
        V.setflags(write=False)
        object.__setattr__(self, "entries", V)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    @property
    def shape(self):
        return self.entries.shape

    def min_symplectic_eigenvalue(self) -> float:
        from .entanglement import symplectic_eigenvalues

        return float(symplectic_eigenvalues(self.entries)[0])

    def is_physical(self, tol: float = 1e-9) -> bool:
        """True when every symplectic eigenvalue is at least ``1/2 - tol``."""
        try:
            return self.min_symplectic_eigenvalue() >= 0.5 - tol
        except ValueError:
            return False


def _as_square(M, name):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidParameterError(name, f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NumericalError(f"{name} has non-finite entries")
    return M


def _rate_scale(A):
    s = np.max(np.abs(A))
    return s if s > 0 else 1.0


def is_stable(A) -> StabilityInfo:
    """Check whether every eigenvalue of ``A`` has a negative real part.

    The threshold is relative: stable iff ``max Re(lambda) < -1e-9 * rho(A)``
    so the answer does not depend on the unit of time.
    """
    A = _as_square(A, "A")
    try:
        eigs = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue solver did not converge: {exc}") from exc
    max_re = float(np.max(eigs.real))
    rho = float(np.max(np.abs(eigs)))
    return StabilityInfo(max_re < -STABILITY_EPS * rho, max_re)


def _symmetric_basis(n):
    iu = np.triu_indices(n)
    pos = np.empty((n, n), dtype=int)
    pos[iu] = np.arange(len(iu[0]))
    pos[(iu[1], iu[0])] = pos[iu]
    expand = np.zeros((n * n, len(iu[0])))
    expand[np.arange(n * n), pos.ravel()] = 1.0
    rows = iu[0] * n + iu[1]
    return expand, rows


def _lyapunov_system(A):
    n = A.shape[0]
    eye = np.eye(n)
    # row-major vec: (A V)_ij -> kron(A, I), (V A^T)_ij -> kron(I, A)
    L = np.kron(A, eye) + np.kron(eye, A)
    expand, rows = _symmetric_basis(n)
    return L[rows] @ expand, expand, rows


def lyapunov_residual(A, V, D) -> float:
    A, V, D = (np.asarray(M, dtype=float) for M in (A, V, D))
    return float(np.max(np.abs(A @ V + V @ A.T + D)))


def solve_lyapunov(A, D, *, check_stability: bool = True) -> CovarianceMatrix:
    """Solve ``A V + V A^T = -D`` for the symmetric steady-state matrix ``V``.

    The equation is vectorized (Kronecker sum) and restricted to the
    ``n(n+1)/2`` independent entries of ``V``; rates are divided by
    ``max|A_ij|`` first, which leaves ``V`` unchanged.

    Raises:
        UnstableSystemError: ``A`` is not Hurwitz.
    """
    A = _as_square(A, "A")
    D = _as_square(D, "D")
    if A.shape != D.shape:
        raise InvalidParameterError("D", f"shape {D.shape} does not match A {A.shape}")
    if check_stability:
        info = is_stable(A)
        if not info.stable:
            raise UnstableSystemError(
                f"drift matrix is not stable (max Re lambda = {info.max_real_part:.6g})",
                info.max_real_part,
            )
    s = _rate_scale(A)
    a, d = A / s, (D + D.T) / (2 * s)
    M, expand, rows = _lyapunov_system(a)
    rhs = -d.ravel()[rows]
    try:
        x = np.linalg.solve(M, rhs)
        # one step of iterative refinement
        x += np.linalg.solve(M, rhs - M @ x)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular Lyapunov system: {exc}") from exc
    n = A.shape[0]
    V = (expand @ x).reshape(n, n)
    V = (V + V.T) / 2
    cond = float(np.linalg.cond(M))
    return CovarianceMatrix(
        V,
        residual=lyapunov_residual(a, V, d) * s,
        condition=cond,
        ill_conditioned=cond > CONDITION_LIMIT,
    )


def integrate_covariance(A, D, V0, t: float, *, rtol: float = 1e-9) -> CovarianceMatrix:
    """Propagate ``dV/dt = A V + V A^T + D`` from ``V0`` for a time ``t`` (seconds).

    Time is rescaled by ``max|A_ij|`` internally; the integrator is an
    adaptive 8th-order Runge-Kutta scheme.
    """
    A = _as_square(A, "A")
    D = _as_square(D, "D")
    V0 = _as_square(V0, "V0")
    if t < 0:
        raise InvalidParameterError("t", "must be non-negative")
    if not np.allclose(V0, V0.T, rtol=1e-12, atol=1e-12 * max(1.0, np.max(np.abs(V0)))):
        raise InvalidParameterError("V0", "must be symmetric")
    if t == 0:
        return CovarianceMatrix(V0)
    n = A.shape[0]
    s = _rate_scale(A)
    a, d = A / s, D / s
    tau = t * s

    def rhs(_, y):
        V = y.reshape(n, n)
        AV = a @ V
        return (AV + AV.T + d).ravel()

    slowest = abs(np.max(np.linalg.eigvals(a).real))
    scale = max(np.max(np.abs(V0)), np.max(np.abs(d)) / max(slowest, 1e-6), 1e-300)
    sol = solve_ivp(
        rhs, (0.0, tau), V0.ravel(), method="DOP853", rtol=rtol, atol=rtol * scale * 1e-3
    )
    if sol.status != 0:
        raise NumericalError(f"covariance integration failed: {sol.message}")
    V = sol.y[:, -1].reshape(n, n)
    return CovarianceMatrix((V + V.T) / 2)
