"""Laboratory parameters -> semiclassical working point -> linearized model.

All rates and frequencies are angular (rad/s). Quadrature ordering of the
fluctuation vector is (q, p, X, Y, x, y): mirror, cavity field, atoms.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from .constants import C, HBAR, K_B
from .dynamics import is_stable
from .errors import BosonicApproximationError, InvalidParameterError, NumericalError, UnstableSystemError

MIN_QUALITY_FACTOR = 100.0
MARKOV_WARN_QUALITY_FACTOR = 1e4
EXCITATION_WARN = 0.01
EXCITATION_ERROR = 0.1

KAPPA_CONVENTIONS = ("linewidth", "half-linewidth")


def kappa_from_finesse(cavity_length: float, finesse: float, convention: str = "linewidth") -> float:
    """Cavity decay rate (rad/s) from length and finesse.

    ``"linewidth"`` gives ``pi c / (L F)``, i.e. ``2 pi FSR / F``; this is the
    default because it reproduces the quoted G_m = 2 pi x 8 MHz at
    P = 35 mW. ``"half-linewidth"`` gives ``pi c / (2 L F)``.
    """
    if convention not in KAPPA_CONVENTIONS:
        raise InvalidParameterError("kappa_convention", f"must be one of {KAPPA_CONVENTIONS}")
    kappa = math.pi * C / (cavity_length * finesse)
    return kappa / 2 if convention == "half-linewidth" else kappa


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory inputs. Exactly one of ``finesse`` / ``kappa`` must be given."""

    omega_m: float
    quality_factor: float
    mass: float
    cavity_length: float
    laser_wavelength: float
    laser_power: float
    detuning_f: float
    atom_coupling: float
    atom_linewidth: float
    detuning_a: float
    temperature: float
    finesse: Optional[float] = None
    kappa: Optional[float] = None
    single_atom_g: Optional[float] = None
    kappa_convention: str = "linewidth"

    def __post_init__(self):
        if (self.finesse is None) == (self.kappa is None):
            raise InvalidParameterError("finesse", "exactly one of finesse or kappa is required")
        positive = ["omega_m", "quality_factor", "mass", "cavity_length", "laser_wavelength"]
        positive.append("finesse" if self.finesse is not None else "kappa")
        for name in positive:
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameterError(name, f"must be positive, got {value!r}")
        for name in ("laser_power", "atom_coupling", "atom_linewidth", "temperature"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise InvalidParameterError(name, f"must be non-negative, got {value!r}")
        for name in ("detuning_f", "detuning_a"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(name, "must be finite")
        if self.single_atom_g is not None and not self.single_atom_g >= 0:
            raise InvalidParameterError("single_atom_g", "must be non-negative")
        _check_quality_factor(self.quality_factor)
        _check_atoms(self.atom_coupling, self.atom_linewidth, self.detuning_a)


def _check_quality_factor(Q):
    if Q < MIN_QUALITY_FACTOR:
        raise InvalidParameterError(
            "quality_factor", f"Q = {Q:g} is below {MIN_QUALITY_FACTOR:g}; Markovian bath not valid"
        )
    if Q < MARKOV_WARN_QUALITY_FACTOR:
        warnings.warn(f"quality factor {Q:g} < 1e4: Markovian Brownian noise is a rough approximation")


def _check_atoms(G_a, gamma_a, Delta_a):
    if G_a > 0 and gamma_a == 0 and Delta_a == 0:
        raise InvalidParameterError(
            "atom_linewidth", "undamped resonant atoms (gamma_a = Delta_a = 0) have no steady state"
        )


class DerivedConstants(NamedTuple):
    omega_c: float
    omega_l: float
    G_0: float
    E_l: float
    kappa: float
    gamma_m: float


def derive_constants(p: PhysicalParams) -> DerivedConstants:
    """Laser/cavity frequencies, radiation-pressure coupling and drive amplitude."""
    omega_l = 2 * math.pi * C / p.laser_wavelength
    omega_c = omega_l + p.detuning_f
    if omega_c <= 0:
        raise InvalidParameterError("detuning_f", "cavity frequency omega_l + detuning_f must be positive")
    if p.kappa is not None:
        kappa = p.kappa
    else:
        kappa = kappa_from_finesse(p.cavity_length, p.finesse, p.kappa_convention)
    if not kappa > 0:
        raise InvalidParameterError("finesse", "derived kappa is not positive")
    G_0 = omega_c / p.cavity_length * math.sqrt(HBAR / (p.mass * p.omega_m))
    E_l = math.sqrt(2 * p.laser_power * kappa / (HBAR * omega_l))
    return DerivedConstants(omega_c, omega_l, G_0, E_l, kappa, p.omega_m / p.quality_factor)


def thermal_occupation(T: float, omega_m: float) -> float:
    """Bose-Einstein mean phonon number; exactly 0 at T = 0."""
    if T < 0:
        raise InvalidParameterError("temperature", "must be non-negative")
    if omega_m <= 0:
        raise InvalidParameterError("omega_m", "must be positive")
    if T == 0:
        return 0.0
    return 1.0 / math.expm1(HBAR * omega_m / (K_B * T))


@dataclass(frozen=True)
class EffectiveParams:
    """Rates entering the linearized model; fully determines A and D."""

    omega_m: float
    gamma_m: float
    kappa: float
    Delta: float
    G_m: float
    G_a: float
    gamma_a: float
    Delta_a: float
    nbar: float

    def __post_init__(self):
        for name in ("omega_m", "gamma_m", "kappa"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameterError(name, f"must be positive, got {value!r}")
        for name in ("G_a", "gamma_a", "nbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise InvalidParameterError(name, f"must be non-negative, got {value!r}")
        for name in ("Delta", "G_m", "Delta_a"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(name, "must be finite")
        _check_atoms(self.G_a, self.gamma_a, self.Delta_a)

    def scaled(self, s: float) -> "EffectiveParams":
        """All rates multiplied by ``s``; ``nbar`` unchanged."""
        return replace(
            self,
            **{k: getattr(self, k) * s for k in ("omega_m", "gamma_m", "kappa", "Delta", "G_m", "G_a", "gamma_a", "Delta_a")},
        )


@dataclass(frozen=True)
class WorkingPoint:
    alpha_s: float
    photon_number: float
    q_s: float
    c_s: complex
    G_m: float
    Delta: float
    bistable: bool
    all_roots: tuple
    excitation_probability: Optional[float] = None
    warnings: tuple = field(default=())


def _atomic_load(G_a, gamma_a, Delta_a):
    """G_a^2 / (gamma_a + i Delta_a), the atoms' complex contribution to the cavity response."""
    if G_a == 0:
        return 0j
    return G_a**2 / complex(gamma_a, Delta_a)


def intensity_cubic(p: PhysicalParams, const: Optional[DerivedConstants] = None):
    """Coefficients (highest power first) of the cubic in I = |alpha_s|^2.

    With ``K = kappa + Re(load)``, ``d0 = Delta_f + Im(load)`` and
    ``beta = G_0^2 / omega_m`` the squared modulus of the steady-state field
    equation reads ``beta^2 I^3 - 2 d0 beta I^2 + (K^2 + d0^2) I - E_l^2 = 0``.
    """
    const = const or derive_constants(p)
    load = _atomic_load(p.atom_coupling, p.atom_linewidth, p.detuning_a)
    K = const.kappa + load.real
    d0 = p.detuning_f + load.imag
    beta = const.G_0**2 / p.omega_m
    return np.array([beta**2, -2 * d0 * beta, K**2 + d0**2, -const.E_l**2])


def _cubic_roots(coeffs):
    b3, b2, b1, b0 = coeffs
    if b0 == 0:
        return [0.0]
    # x = I / s with s the linear-cavity intensity; puts the linear coefficient at 1
    s = -b0 / b1
    scaled = np.array([b3 * s**3, b2 * s**2, b1 * s, b0]) / -b0
    raw = np.roots(np.trim_zeros(scaled, "f"))
    poly = np.poly1d(coeffs)
    dpoly = poly.deriv()
    roots = []
    for r in raw:
        if abs(r.imag) > 1e-6 * max(1.0, abs(r)):
            continue
        x = r.real * s
        for _ in range(50):
            dp = dpoly(x)
            if dp == 0:
                break
            step = poly(x) / dp
            x -= step
            if abs(step) <= 1e-15 * abs(x):
                break
        if x > 0:
            roots.append(float(x))
    roots.sort()
    unique = []
    for x in roots:
        if not unique or abs(x - unique[-1]) > 1e-9 * x:
            unique.append(x)
    return unique


def _effective_from_intensity(p, const, intensity, nbar):
    G_m = const.G_0 * math.sqrt(2 * intensity)
    Delta = p.detuning_f - G_m**2 / (2 * p.omega_m)
    return EffectiveParams(
        omega_m=p.omega_m,
        gamma_m=const.gamma_m,
        kappa=const.kappa,
        Delta=Delta,
        G_m=G_m,
        G_a=p.atom_coupling,
        gamma_a=p.atom_linewidth,
        Delta_a=p.detuning_a,
        nbar=nbar,
    )


def solve_working_point(p: PhysicalParams) -> WorkingPoint:
    """Semiclassical steady state of the driven cavity-atoms-mirror system.

    All positive real roots of the intensity cubic are returned in
    ``all_roots``; the operating point is the lowest-intensity root whose
    linearized dynamics is stable.

    Raises:
        UnstableSystemError: no root gives a stable drift matrix.
        BosonicApproximationError: single-atom excitation probability >= 0.1.
    """
    const = derive_constants(p)
    coeffs = intensity_cubic(p, const)
    roots = _cubic_roots(coeffs)
    if not roots:
        raise NumericalError("intensity cubic has no positive real root")
    chosen = None
    worst = -math.inf
    for intensity in roots:
        eff = _effective_from_intensity(p, const, intensity, 0.0)
        info = is_stable(build_drift(eff))
        if info.stable:
            chosen = intensity
            break
        worst = max(worst, info.max_real_part)
    if chosen is None:
        raise UnstableSystemError("no stable working point among the intensity roots", worst)

    alpha = math.sqrt(chosen)
    G_m = const.G_0 * alpha * math.sqrt(2)
    notes = []
    prob = None
    if p.single_atom_g is not None:
        denom = p.detuning_a**2 + p.atom_linewidth**2
        prob = p.single_atom_g**2 * chosen / denom if denom > 0 else math.inf
        if prob >= EXCITATION_ERROR:
            raise BosonicApproximationError(
                f"bosonic approximation violated: single-atom excitation probability {prob:.3g} >= {EXCITATION_ERROR}"
            )
        if prob >= EXCITATION_WARN:
            notes.append(f"single-atom excitation probability {prob:.3g} is not small")
    if p.atom_coupling > 0:
        c_s = -1j * p.atom_coupling * alpha / complex(p.atom_linewidth, p.detuning_a)
    else:
        c_s = 0j
    return WorkingPoint(
        alpha_s=alpha,
        photon_number=chosen,
        q_s=const.G_0 * chosen / p.omega_m,
        c_s=c_s,
        G_m=G_m,
        Delta=p.detuning_f - G_m**2 / (2 * p.omega_m),
        bistable=len(roots) > 1,
        all_roots=tuple(roots),
        excitation_probability=prob,
        warnings=tuple(notes),
    )


def field_equation_residual(p: PhysicalParams, alpha: complex) -> complex:
    """alpha [kappa + i Delta_f - i G_0^2 |alpha|^2 / omega_m + load] - E_l."""
    const = derive_constants(p)
    load = _atomic_load(p.atom_coupling, p.atom_linewidth, p.detuning_a)
    bracket = const.kappa + 1j * p.detuning_f - 1j * const.G_0**2 * abs(alpha) ** 2 / p.omega_m + load
    return alpha * bracket - const.E_l


def with_effective_detuning(p: PhysicalParams, Delta: float) -> PhysicalParams:
    """Return ``p`` with ``detuning_f`` chosen so the effective detuning equals ``Delta``.

    At fixed effective detuning the intensity follows from the linear relation
    ``I |K + i(Delta + Im load)|^2 = E_l^2``, so the inversion is closed form
    and unique.
    """
    const = derive_constants(p)
    load = _atomic_load(p.atom_coupling, p.atom_linewidth, p.detuning_a)
    intensity = const.E_l**2 / abs(const.kappa + load + 1j * Delta) ** 2
    # omega_c enters G_0, so iterate the (tiny) dependence to a fixed point
    detuning = Delta + const.G_0**2 * intensity / p.omega_m
    for _ in range(5):
        q = replace(p, detuning_f=detuning)
        const = derive_constants(q)
        detuning = Delta + const.G_0**2 * intensity / p.omega_m
    return replace(p, detuning_f=detuning)


def effective_params(p: PhysicalParams, w: WorkingPoint) -> EffectiveParams:
    const = derive_constants(p)
    return EffectiveParams(
        omega_m=p.omega_m,
        gamma_m=const.gamma_m,
        kappa=const.kappa,
        Delta=w.Delta,
        G_m=w.G_m,
        G_a=p.atom_coupling,
        gamma_a=p.atom_linewidth,
        Delta_a=p.detuning_a,
        nbar=thermal_occupation(p.temperature, p.omega_m),
    )


def build_drift(e: EffectiveParams) -> np.ndarray:
    """6x6 drift matrix of the linearized fluctuations, ordering (q, p, X, Y, x, y)."""
    wm, Gm, Ga = e.omega_m, e.G_m, e.G_a
    A = np.zeros((6, 6))
    A[0, 1] = wm
    A[1, 0], A[1, 1], A[1, 2] = -wm, -e.gamma_m, Gm
    A[2, 2], A[2, 3], A[2, 5] = -e.kappa, e.Delta, Ga
    A[3, 0], A[3, 2], A[3, 3], A[3, 4] = Gm, -e.Delta, -e.kappa, -Ga
    A[4, 3], A[4, 4], A[4, 5] = Ga, -e.gamma_a, e.Delta_a
    A[5, 2], A[5, 4], A[5, 5] = -Ga, -e.Delta_a, -e.gamma_a
    return A


def build_diffusion(e: EffectiveParams) -> np.ndarray:
    return np.diag([0.0, e.gamma_m * (2 * e.nbar + 1), e.kappa, e.kappa, e.gamma_a, e.gamma_a])


class DriftDiffusion(NamedTuple):
    A: np.ndarray
    D: np.ndarray
    ordering: tuple = ("q", "p", "X", "Y", "x", "y")


def drift_diffusion(e: EffectiveParams) -> DriftDiffusion:
    return DriftDiffusion(build_drift(e), build_diffusion(e))
