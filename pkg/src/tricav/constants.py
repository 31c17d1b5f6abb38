"""Physical constants used throughout the package (CODATA 2022, via scipy)."""

from scipy import constants as _sc

#: Bumped whenever a value below changes; recorded in sweep metadata.
CONSTANTS_VERSION = "CODATA2022"

HBAR = _sc.hbar  # J s
K_B = _sc.k  # J / K
C = _sc.c  # m / s
EPSILON_0 = _sc.epsilon_0  # F / m

TABLE = {"hbar": HBAR, "k_B": K_B, "c": C, "epsilon_0": EPSILON_0}
