"""Optimal transport between group-conditional discrete distributions.

Rows of a plan index the observed group's levels (source marginal p'),
columns the baseline group's levels (target marginal p). For ordered levels
with cost |i-j|^p, p > 1, the monotone (northwest-corner) sweep is the unique
optimal coupling. For unordered levels with 0/1 cost, diagonal mass is kept
in place and the residuals are coupled by a deterministic sweep; the
off-diagonal mass then equals the total-variation distance, which is the
optimal 0/1 cost.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TransportError, ZeroMassRowError

__all__ = [
    "TransportPlan",
    "solve_monotone",
    "solve_zero_one",
    "counterfactual_distribution",
    "sample_counterfactual",
    "binary_rule",
]

_MARGINAL_TOL = 1e-9


@dataclass(frozen=True)
class TransportPlan:
    """m x m coupling with its marginals and the cost it was solved under.

    ``cost_kind`` is ``("lp", exponent)`` or ``("zero_one", None)``.
    """

    plan: np.ndarray
    source_marginal: np.ndarray  # observed (non-baseline) group, rows
    target_marginal: np.ndarray  # baseline group, columns
    cost_kind: tuple[str, float | None]

    @property
    def size(self) -> int:
        return self.plan.shape[0]

    def cost(self) -> float:
        m = self.size
        i = np.arange(m)[:, None]
        j = np.arange(m)[None, :]
        if self.cost_kind[0] == "lp":
            c = np.abs(i - j).astype(np.float64) ** self.cost_kind[1]
        else:
            c = (i != j).astype(np.float64)
        return float(np.sum(self.plan * c))

    def off_diagonal_mass(self) -> float:
        return float(self.plan.sum() - np.trace(self.plan))

    def max_marginal_violation(self) -> float:
        row = np.abs(self.plan.sum(axis=1) - self.source_marginal).max()
        col = np.abs(self.plan.sum(axis=0) - self.target_marginal).max()
        return float(max(row, col))

    def is_monotone(self) -> bool:
        """True when no pair of positive entries strictly crosses."""
        prev_max = -1
        for r in range(self.size):
            cols = np.nonzero(self.plan[r] > 0)[0]
            if cols.size == 0:
                continue
            if cols.min() < prev_max:
                return False
            prev_max = max(prev_max, int(cols.max()))
        return True


def _check_marginals(source, target) -> tuple[np.ndarray, np.ndarray]:
    source = np.asarray(source, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if source.ndim != 1 or target.ndim != 1:
        raise TransportError("marginals must be 1-d probability vectors")
    if source.shape != target.shape:
        raise TransportError(
            f"marginal length mismatch: {source.shape[0]} vs {target.shape[0]}"
        )
    for name, vec in (("source", source), ("target", target)):
        if np.any(vec < 0):
            raise TransportError(f"negative mass in {name} marginal")
        s = vec.sum()
        if abs(s - 1.0) > _MARGINAL_TOL:
            raise TransportError(
                f"{name} marginal sums to {s!r}, more than {_MARGINAL_TOL} from 1"
            )
    return source / source.sum(), target / target.sum()


def _northwest_sweep(source: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Greedy coupling; exact because min() leaves one residual at 0.0."""
    m = source.shape[0]
    plan = np.zeros((m, m))
    s_rem = source.copy()
    t_rem = target.copy()
    i = j = 0
    while i < m and j < m:
        move = min(s_rem[i], t_rem[j])
        plan[i, j] += move
        s_rem[i] -= move
        t_rem[j] -= move
        advance_i = s_rem[i] <= t_rem[j]
        advance_j = t_rem[j] <= s_rem[i]
        if advance_i:
            i += 1
        if advance_j:
            j += 1
    return plan


def solve_monotone(source, target, exponent: float = 2.0) -> TransportPlan:
    """Monotone coupling for strictly convex |i-j|^exponent cost.

    Optimal for every exponent >= 1 and the unique optimum for exponent > 1.
    """
    if not exponent >= 1.0:
        raise TransportError(f"exponent must be >= 1, got {exponent}")
    source, target = _check_marginals(source, target)
    plan = _northwest_sweep(source, target)
    return TransportPlan(plan, source, target, ("lp", float(exponent)))


def solve_zero_one(source, target) -> TransportPlan:
    """Minimal-movement coupling for 0/1 cost.

    Diagonal entries are min(source_i, target_i); residual mass is coupled by
    a monotone sweep purely to make the (non-unique) optimum deterministic.
    """
    source, target = _check_marginals(source, target)
    diag = np.minimum(source, target)
    plan = np.diag(diag) + _northwest_sweep(source - diag, target - diag)
    return TransportPlan(plan, source, target, ("zero_one", None))


def counterfactual_distribution(plan: TransportPlan, observed_level: int) -> np.ndarray:
    """Normalized plan row: the law of the baseline-world level given the
    observed one.

    Rows of a sweep plan sum to the source marginal by construction, so that
    marginal is the exact normalizer (a recomputed row sum can be an ulp
    off).
    """
    if not 0 <= observed_level < plan.size:
        raise TransportError(f"level {observed_level} outside [0, {plan.size})")
    mass = plan.source_marginal[observed_level]
    if mass <= 0:
        raise ZeroMassRowError(
            f"observed level {observed_level} has zero mass in the plan"
        )
    return plan.plan[observed_level] / mass


def sample_counterfactual(dist, u: float) -> int:
    """Generalized inverse CDF: smallest level with cumulative mass >= u."""
    dist = np.asarray(dist, dtype=np.float64)
    if np.any(dist < 0) or abs(dist.sum() - 1.0) > 1e-9:
        raise TransportError("distribution must be nonnegative and sum to 1")
    u = float(u)
    if not 0.0 <= u <= 1.0:
        raise TransportError(f"u must lie in [0, 1], got {u}")
    cum = np.cumsum(dist)
    idx = int(np.searchsorted(cum, u, side="left"))
    return min(idx, dist.shape[0] - 1)


def binary_rule(p0: float, p0_prime: float) -> tuple[float, float]:
    """Two-level counterfactual law for an observed 0: (stay at 0, move to 1).

    Keeps the value with probability min(1, p0/p0') and moves it up with the
    remaining max(0, (p0'-p0)/p0').
    """
    if p0_prime <= p0:
        return 1.0, 0.0
    return p0 / p0_prime, (p0_prime - p0) / p0_prime
