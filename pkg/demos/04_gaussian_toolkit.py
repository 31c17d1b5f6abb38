"""The Gaussian-state toolkit on textbook states.

Two-mode squeezed vacuum has E_N = 2r; a squeezed pair next to a vacuum mode
is biseparable with the vacuum mode split off.
"""
import numpy as np
from scipy.linalg import block_diag

from tricav import log_negativity_2mode, partial_transpose, symplectic_eigenvalues, tripartite_class


def two_mode_squeezed(r):
    ch, sh = np.cosh(2 * r) / 2, np.sinh(2 * r) / 2
    return np.block([[ch * np.eye(2), sh * np.diag([1, -1])], [sh * np.diag([1, -1]), ch * np.eye(2)]])


for r in (0.1, 0.5, 1.0):
    V = two_mode_squeezed(r)
    nu_pt = symplectic_eigenvalues(partial_transpose(V, 1))
    print(f"r = {r}:  nu = {symplectic_eigenvalues(V)}  PT nu = {nu_pt}  E_N = {log_negativity_2mode(V):.6f}")

V3 = block_diag(two_mode_squeezed(1.0), 0.5 * np.eye(2))
c = tripartite_class(V3)
print(f"\nsqueezed pair + vacuum: {c} (PT eigenvalues {np.round(c.pt_eigenvalues, 4)})")
