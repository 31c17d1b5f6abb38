"""Cooling working point of the bare optomechanical cavity.

Solve the semiclassical steady state for a 10 MHz, 10 ng mirror in a 1 mm,
finesse 3e4 cavity driven with 35 mW, then sweep the effective detuning
around the anti-Stokes resonance and watch the mirror occupation drop.
"""
import math
from dataclasses import replace

import numpy as np

from tricav import PhysicalParams, effective_params, solve_working_point, thermal_occupation, with_effective_detuning
from tricav.harness import evaluate_point

omega_m = 2 * math.pi * 1e7
lab = PhysicalParams(
    omega_m=omega_m, quality_factor=1e5, mass=1e-11, cavity_length=1e-3, finesse=3e4,
    laser_wavelength=1064e-9, laser_power=0.035, detuning_f=0.0,
    atom_coupling=0.0, atom_linewidth=2 * math.pi * 5e6, detuning_a=-omega_m, temperature=0.6,
)

# %% Working point at Delta = omega_m
lab = with_effective_detuning(lab, omega_m)
wp = solve_working_point(lab)
print(f"thermal occupation at 0.6 K : {thermal_occupation(0.6, omega_m):.1f}")
print(f"intracavity photons         : {wp.photon_number:.3e}")
print(f"G_m / 2pi                   : {wp.G_m / 2 / math.pi / 1e6:.3f} MHz")
print(f"bistable roots              : {len(wp.all_roots)} (lowest stable one used)")

# %% Sweep the effective detuning at fixed G_m
eff = effective_params(lab, wp)
print("\n Delta/omega_m   n_eff    E_mf")
for x in np.arange(0.4, 2.01, 0.2):
    row = evaluate_point(replace(eff, Delta=x * omega_m))
    print(f"  {x:8.2f}   {row.report.n_eff:7.4f}  {row.report.E_mf:.4f}")
