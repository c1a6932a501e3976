#!/usr/bin/env python3
"""Where the model lives: the critical exponent and the admissibility windows.

The nonlinearity exponent n must exceed the critical value n* (the unique
positive root of n^3 + 5n^2 + 16n - 40) for solutions to exist at all, and
blow-up additionally needs a heavy degeneracy weight (alpha > n+4), a beta
window, and a moment shift kappa below four simultaneous caps.  This script
prints the windows around the physical parameter point n=2, alpha=13/2,
beta=1/2 and scans how much kappa room each beta leaves.
"""

import numpy as np

from becflow import ModelParameters, check_admissibility, compute_nstar, kappa_upper_bound
from becflow.params import cubic_residual

nstar = compute_nstar()
print(f"critical exponent n* = {nstar:.12f}")
print(f"cubic residual       = {cubic_residual(nstar):.2e}")
print()

physical = ModelParameters(n=2.0, alpha=6.5, beta=0.5, gamma=0.0, kappa=0.4)
for mode in ("existence", "blowup"):
    report = check_admissibility(physical, mode=mode)
    ok = report.existence_ok if mode == "existence" else report.blowup_ok
    print(f"physical point, {mode:9s}: {'admissible' if ok else 'rejected'}")
print(f"kappa cap at the physical point: {report.kappa_max}")
print()

# kappa room across the blow-up beta window (1/6, 3/4] at n=2, alpha=13/2
print("beta      kappa_max")
for beta in np.linspace(0.17, 0.75, 13):
    p = ModelParameters(n=2.0, alpha=6.5, beta=float(beta))
    print(f"{beta:6.3f}   {kappa_upper_bound(p):8.4f}")

print()
print("outside the windows:")
for label, p in [
    ("n below critical", ModelParameters(n=1.2, alpha=6.5, beta=0.5, gamma=0.0, kappa=0.4)),
    ("alpha too small ", ModelParameters(n=2.0, alpha=5.9, beta=0.5, gamma=0.0, kappa=0.4)),
    ("kappa at the cap", ModelParameters(n=2.0, alpha=6.5, beta=0.5, gamma=0.0, kappa=0.5)),
]:
    rep = check_admissibility(p, mode="blowup")
    reasons = ", ".join(name for name, _ in rep.violated)
    print(f"  {label}: blowup_ok={rep.blowup_ok}  ({reasons})")
