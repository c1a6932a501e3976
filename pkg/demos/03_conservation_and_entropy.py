#!/usr/bin/env python3
"""Structure preservation on a smooth run: exact mass, falling entropy.

A bump on a positive pedestal diffuses under the regularized flow.  The
implicit finite-volume scheme conserves the weighted mass to round-off by
construction (the update is a telescoping flux difference), and the
logarithmic entropy -int (x+eps)^beta ln u decreases monotonically, with
the square-structured production rate recorded alongside.
"""

from pathlib import Path

import numpy as np

from becflow import parse_config, run

CONFIG = """
n = 2
alpha = 6.5
beta = 0.5
kappa = 0.4
length = 1
epsilon = 1e-3
grid.cells = 256
initial.kind = bump
initial.center = 0.5
initial.width = 0.2
initial.height = 1
initial.baseline = 0.5
time.t_end = 1
time.dt_init = 1e-8
time.dt_max = 1e-2
time.max_steps = 100
time.sample_interval = 0
"""

result = run(parse_config(CONFIG))
records = result.records
mass = np.array([r.mass for r in records])
entropy = np.array([r.entropy for r in records])
production = np.array([r.entropy_production for r in records])

print(f"steps: {result.final_state.step_count}, reached t = {result.final_state.t:.4f}")
print(f"relative mass drift: {np.max(np.abs(mass - mass[0]))/mass[0]:.2e}")
print(f"entropy: {entropy[0]:.6f} -> {entropy[-1]:.6f} "
      f"(worst increment {np.diff(entropy).max():.2e})")
print(f"entropy production range: [{production.min():.3e}, {production.max():.3e}]")
print()
print("      t            mass              entropy        production")
for r in records[:: max(1, len(records) // 12)]:
    print(f"{r.t:11.4e}  {r.mass:.15f}  {r.entropy:12.8f}  {r.entropy_production:11.4e}")

out = Path("demo_output")
out.mkdir(exist_ok=True)
np.savetxt(out / "entropy_history.csv",
           np.column_stack([[r.t for r in records], entropy, production]),
           header="t,entropy,entropy_production", delimiter=",", comments="")
print(f"\nplot-ready history written to {out/'entropy_history.csv'}")
