"""Steady-state entanglement of a cavity with an atomic ensemble and a vibrating mirror.

The workflow is laboratory parameters -> semiclassical working point ->
linearized drift/diffusion -> Lyapunov covariance matrix -> Gaussian
entanglement measures. Each stage is exposed as a plain function.
"""

from .constants import CONSTANTS_VERSION, C, EPSILON_0, HBAR, K_B
from .dynamics import (
    CovarianceMatrix,
    StabilityInfo,
    integrate_covariance,
    is_stable,
    solve_lyapunov,
)
from .entanglement import (
    MODES,
    EntanglementReport,
    TripartiteClass,
    effective_occupation,
    log_negativity_1v2,
    log_negativity_2mode,
    partial_transpose,
    reduce,
    report,
    symplectic_eigenvalues,
    symplectic_form,
    tripartite_class,
)
from .errors import (
    BosonicApproximationError,
    ConfigError,
    InvalidParameterError,
    NumericalError,
    TricavError,
    UnstableSystemError,
)
from .harness import (
    PRESETS,
    SweepResult,
    emit,
    load_preset,
    parse_config,
    preset_text,
    run_sweep,
)
from .model import (
    DerivedConstants,
    DriftDiffusion,
    EffectiveParams,
    PhysicalParams,
    WorkingPoint,
    build_diffusion,
    build_drift,
    derive_constants,
    drift_diffusion,
    effective_params,
    kappa_from_finesse,
    solve_working_point,
    thermal_occupation,
    with_effective_detuning,
)

__version__ = "0.1.0"
