"""Exact value tables for tiny sequential auctions against a budgeted rival.

A bidder values m identical items at 1/m each; the other bidder has no value
for them, only a budget B and the will to hurt.  Backward induction makes the
guaranteed profit a piecewise-linear function of B.  This script prints the
exact functions for m = 1, 2, 3 and checks them against the closed forms.
"""

import numpy as np

from riskfree import analysis, seq

for m in (1, 2, 3):
    fm = seq.uniform_additive_value(m)
    print(f"\nm = {m}: {len(fm.xs) - 1} linear pieces")
    print("  breakpoints:", ", ".join(f"{x:.6f}" for x in fm.xs))
    print("  values:     ", ", ".join(f"{y:.6f}" for y in fm.ys))

# Spot-check against the hand-derived tables on a dense budget grid.
grid = np.linspace(0.0, 1.2, 1201)
for m in (1, 2, 3):
    fm = seq.uniform_additive_value(m)
    table = np.array([analysis.table_A(m, float(b)) for b in grid])
    err = float(np.max(np.abs(fm(grid) - table)))
    print(f"m = {m}: max |solver - closed form| = {err:.2e}")

# The three-item function has the famous kinks at 1/9, 1/6, 1/3, 5/9, 2/3.
f3 = seq.uniform_additive_value(3)
print("\nthree-item kinks as fractions:", [f"{x:.9f}" for x in f3.xs[1:-1]])

# A coarse game-tree oracle converges to the same values from below.
for delta in (0.01, 0.001):
    from riskfree.valuations import AdditiveValuation

    v = AdditiveValuation((0.5, 0.5))
    val = seq.solve_discretized(v, 0.3, delta)
    print(f"grid oracle, two items, B=0.3, delta={delta}: {val:.4f} (exact 0.45)")
