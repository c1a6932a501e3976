#!/usr/bin/env python3
"""Numeric oracles for the weighted interpolation inequalities.

Four inequalities carry the analysis: a pointwise-below-average bound (an
unconditional theorem: any violation means a quadrature bug), a shifted-
moment interpolation, a degenerate-weight interpolation with a free Young
parameter, and a Gagliardo-Nirenberg-type subinterval bound.  The script
fuzzes them over a corpus of random nonnegative piecewise-C1 functions and
reports the constants each inequality would need.
"""

import numpy as np

from becflow import ModelParameters, build_grid
from becflow.diagnostics import (
    oracle_lemma20,
    oracle_lemma50,
    oracle_lemma51,
    oracle_lemma99,
    random_corpus,
)

params = ModelParameters(n=2.0, alpha=6.5, beta=0.5, gamma=0.0, kappa=0.4)
grid = build_grid(256, 2.0, 1.0)
corpus = random_corpus(grid, 1000, seed=42)

violations = 0
ratios, c20s, c51s = [], [], []
for u, du in corpus:
    if not oracle_lemma99(u, params.beta, grid)["ok"]:
        violations += 1
    ratios.append(oracle_lemma50(u, params, grid, du=du)["ratio"])
    c20s.append(oracle_lemma20(u, params, 1.0, grid, du=du)["needed_c"])
    c51s.append(oracle_lemma51(u, params.n, 2.0, grid, du=du)["needed_c"])

print(f"corpus size: {len(corpus)}")
print(f"pointwise-below-average violations: {violations}  (must be 0)")
for name, vals in [
    ("shifted-moment ratio      ", ratios),
    ("degenerate-weight C(eta=1)", c20s),
    ("subinterval Lp constant   ", c51s),
]:
    arr = np.array(vals)
    print(f"{name}: max {arr.max():8.4f}   median {np.median(arr):8.4f}")

print()
print("single-function example (constant u = 1):")
r = oracle_lemma99(np.ones(grid.n_cells), 0.0, grid)
print(f"  value at x0 = {r['x0']:.4f}: {r['value']:.3f} <= bound {r['bound']:.3f}")
