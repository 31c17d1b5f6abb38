"""How hot can the mirror bath get before mirror-atoms entanglement dies?

Only the thermal occupation changes along this sweep, so the working point
and drift matrix are fixed and each point is a single Lyapunov solve.
"""
from tricav.harness import load_preset, run_sweep

result = run_sweep(load_preset("fig2d"))
vanish = next((row.axis for row in result.rows if row.report.E_ma == 0.0), None)
last_full = max(row.axis for row in result.rows if row.report.tripartite.label == "fully_inseparable")

for row in result.rows[::20]:
    print(f"T = {row.axis:5.1f} K   E_ma = {row.report.E_ma:.4f}   n_eff = {row.report.n_eff:.3f}   {row.report.tripartite}")
print(f"\nE_ma first vanishes at T = {vanish:.1f} K")
print(f"state is fully inseparable up to at least {last_full:.1f} K")
