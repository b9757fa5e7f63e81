"""Discrete optimal transport between group-conditional laws.

Walks through the two-level worked example (the "lucky sixth") and a
three-level monotone plan, then shows the 0/1-cost coupling for unordered
levels.
"""

import numpy as np

from fairadapt import (
    counterfactual_distribution,
    sample_counterfactual,
    solve_monotone,
    solve_zero_one,
)

# Binary feature: P(V=0) is 0.5 in the baseline group, 0.6 in the other.
plan = solve_monotone([0.6, 0.4], [0.5, 0.5])
print("plan:\n", plan.plan)
row0 = counterfactual_distribution(plan, 0)
print("law of the baseline-world level given observed 0:", row0)
draws = np.random.default_rng(1).random(100_000)
moved = np.mean([sample_counterfactual(row0, u) for u in draws])
print(f"fraction of observed zeros moved up: {moved:.4f} (expect 1/6 = {1/6:.4f})\n")

# Ordered three-level feature: monotone sweep, no crossing mass.
plan3 = solve_monotone([0.2, 0.5, 0.3], [0.4, 0.4, 0.2])
print("three-level monotone plan:\n", plan3.plan)
print("monotone:", plan3.is_monotone(), "| cost:", round(plan3.cost(), 4))

# Unordered levels: keep what you can, move the least mass possible.
zo = solve_zero_one([0.5, 0.3, 0.2], [0.2, 0.3, 0.5])
print("\n0/1-cost plan:\n", zo.plan)
print("off-diagonal mass:", round(zo.off_diagonal_mass(), 4),
      "= total-variation distance", round(0.5 * (abs(0.3) + abs(0.0) + abs(0.3)), 4))
