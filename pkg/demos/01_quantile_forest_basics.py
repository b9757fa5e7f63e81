"""Conditional distributions from a quantile forest.

Fits y = sin(2x) + (0.5 + 0.3|x|) * eps and compares estimated conditional
quantiles against the analytic truth on a grid.
"""

import numpy as np
from scipy.stats import norm

from fairadapt import ForestParams, QuantileForest

rng = np.random.default_rng(0)
n = 8000
x = rng.uniform(-2, 2, size=n)
scale = 0.5 + 0.3 * np.abs(x)
y = np.sin(2 * x) + scale * rng.normal(size=n)

forest = QuantileForest(x[:, None], y, ForestParams(seed=0))

grid = np.linspace(-1.5, 1.5, 7)
print(f"{'x':>6} | {'q10 est':>8} {'q10 true':>9} | {'median est':>10} {'true':>6} | {'q90 est':>8} {'q90 true':>9}")
for xv in grid:
    xq = np.array([xv])
    est10 = forest.conditional_quantile(xq, 0.1)
    est50 = forest.conditional_quantile(xq, 0.5)
    est90 = forest.conditional_quantile(xq, 0.9)
    s = 0.5 + 0.3 * abs(xv)
    t10 = np.sin(2 * xv) + s * norm.ppf(0.1)
    t90 = np.sin(2 * xv) + s * norm.ppf(0.9)
    print(f"{xv:6.2f} | {est10:8.3f} {t10:9.3f} | {est50:10.3f} {np.sin(2*xv):6.3f} | {est90:8.3f} {t90:9.3f}")

# randomized PIT of held-out rows should be uniform
xh = rng.uniform(-2, 2, size=4000)
yh = np.sin(2 * xh) + (0.5 + 0.3 * np.abs(xh)) * rng.normal(size=4000)
u = forest.conditional_cdf(xh[:, None], yh, rng.random(4000))
ks = np.abs(np.sort(u) - (np.arange(u.size) + 0.5) / u.size).max()
print(f"\nheld-out PIT Kolmogorov-Smirnov distance from uniform: {ks:.4f}")
