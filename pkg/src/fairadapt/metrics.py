"""Fairness and performance measures for (probability) predictors.

The parity gap is reported in two forms: thresholded at 0.5 (class
predictions) and as the expected-probability difference. The k-level
calibration score bins predicted probabilities per group and takes the
scaled L1 distance between the per-bin outcome-rate vectors; bins empty in
either group contribute zero.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Callable, Mapping

import numpy as np
from scipy.stats import rankdata

from .errors import DataError
from .semlab import Sem, counterfactual

__all__ = [
    "parity_gap",
    "parity_gap_expected",
    "calibration_score",
    "accuracy",
    "auc",
    "KsResult",
    "ks_two_sample",
    "nde_estimate",
    "EvalReport",
    "evaluate",
]


def _two_groups(attr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    attr = np.asarray(attr)
    g0 = attr == 0
    g1 = ~g0
    if not g0.any() or not g1.any():
        raise DataError("both attribute groups must be nonempty")
    return g0, g1


def parity_gap(pred: np.ndarray, attr: np.ndarray) -> float:
    """P(Yhat=1 | A=0) - P(Yhat=1 | A=1); probabilities threshold at 0.5."""
    pred = np.asarray(pred, np.float64)
    labels = pred if np.isin(pred, (0.0, 1.0)).all() else (pred >= 0.5)
    g0, g1 = _two_groups(attr)
    return float(np.mean(labels[g0]) - np.mean(labels[g1]))


def parity_gap_expected(probs: np.ndarray, attr: np.ndarray) -> float:
    """Expected-probability parity gap: E[Yhat | A=0] - E[Yhat | A=1]."""
    probs = np.asarray(probs, np.float64)
    g0, g1 = _two_groups(attr)
    return float(np.mean(probs[g0]) - np.mean(probs[g1]))


def calibration_score(
    probs: np.ndarray, labels: np.ndarray, attr: np.ndarray, k: int
) -> float:
    """k-level calibration score.

    Rows are binned by predicted probability into [i/k, (i+1)/k) with the top
    bin closed at 1; the score is (1/k) * sum_i |c0_i - c1_i| over per-group,
    per-bin positive-outcome proportions.
    """
    if k < 1:
        raise DataError("k must be at least 1")
    probs = np.asarray(probs, np.float64)
    labels = np.asarray(labels, np.float64)
    if np.any(probs < 0) or np.any(probs > 1):
        raise DataError("probabilities must lie in [0, 1]")
    g0, g1 = _two_groups(attr)
    bins = np.minimum((probs * k).astype(np.int64), k - 1)
    total = 0.0
    for i in range(k):
        m0 = g0 & (bins == i)
        m1 = g1 & (bins == i)
        if not m0.any() or not m1.any():
            continue
        total += abs(labels[m0].mean() - labels[m1].mean())
    return total / k


def accuracy(pred: np.ndarray, labels: np.ndarray) -> float:
    pred = np.asarray(pred, np.float64)
    cls = pred if np.isin(pred, (0.0, 1.0)).all() else (pred >= 0.5)
    return float(np.mean(cls == np.asarray(labels, np.float64)))


def auc(probs: np.ndarray, labels: np.ndarray) -> float:
    """Rank-based AUC: probability a random positive outranks a random
    negative, ties counting one half."""
    probs = np.asarray(probs, np.float64)
    labels = np.asarray(labels)
    pos = labels == 1
    neg = labels == 0
    n1, n0 = int(pos.sum()), int(neg.sum())
    if n1 == 0 or n0 == 0:
        raise DataError("AUC needs both classes present")
    ranks = rankdata(probs)
    return float((ranks[pos].sum() - n1 * (n1 + 1) / 2.0) / (n1 * n0))


@dataclass(frozen=True)
class KsResult:
    statistic: float
    critical_01: float

    @property
    def below_critical(self) -> bool:
        return self.statistic < self.critical_01


def ks_two_sample(x0: np.ndarray, x1: np.ndarray) -> KsResult:
    """Two-sample Kolmogorov-Smirnov statistic with its level-0.01 critical
    value sqrt(-ln(0.005) * (n0+n1) / (2*n0*n1))."""
    x0 = np.sort(np.asarray(x0, np.float64))
    x1 = np.sort(np.asarray(x1, np.float64))
    n0, n1 = x0.size, x1.size
    if n0 == 0 or n1 == 0:
        raise DataError("both samples must be nonempty")
    grid = np.concatenate([x0, x1])
    c0 = np.searchsorted(x0, grid, side="right") / n0
    c1 = np.searchsorted(x1, grid, side="right") / n1
    stat = float(np.abs(c0 - c1).max())
    crit = math.sqrt(-math.log(0.005) * (n0 + n1) / (2.0 * n0 * n1))
    return KsResult(statistic=stat, critical_01=crit)


def nde_estimate(
    sem: Sem,
    predictor: Callable[[Mapping[str, np.ndarray]], np.ndarray],
    resolving,
    baseline: str,
    n: int,
    seed: int,
) -> float:
    """Monte-Carlo natural direct effect of a predictor under the SEM.

    E[Yhat(A=baseline, R=R(other)) - Yhat(A=other)] with shared quantiles:
    the prediction gap that survives once resolver values are granted their
    other-world values. ``predictor`` maps a dict of raw column arrays to
    predictions.
    """
    attr = sem.graph.protected
    spec = sem.column_specs[attr]
    if spec.levels is None or len(spec.levels) != 2:
        raise DataError("nde_estimate expects a two-level protected attribute")
    base_code = float(spec.levels.index(baseline))
    other_code = 1.0 - base_code
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, 0x4DE]))
    )
    u = rng.random((int(n), len(sem.graph.nodes)))
    world_other = counterfactual(sem, u, {attr: other_code})
    mixed_iv: dict[str, np.ndarray | float] = {attr: base_code}
    for r in sorted(frozenset(resolving)):
        mixed_iv[r] = world_other[r]
    world_mixed = counterfactual(sem, u, mixed_iv)
    return float(np.mean(predictor(world_mixed) - predictor(world_other)))


@dataclass
class EvalReport:
    accuracy: float
    auc: float
    parity_gap: float
    parity_gap_expected: float
    calibration_score: float
    calibration_k: int
    n_group0: int
    n_group1: int
    nde: float | None = None
    ripg_lhs: float | None = None
    ripg_bound: float | None = None

    def to_json(self) -> str:
        return json.dumps(
            {k: v for k, v in asdict(self).items() if v is not None}, indent=2
        )


def evaluate(
    probs: np.ndarray, labels: np.ndarray, attr: np.ndarray, k: int = 10
) -> EvalReport:
    """Full report for probability predictions against true labels."""
    g0, g1 = _two_groups(attr)
    return EvalReport(
        accuracy=accuracy(probs, labels),
        auc=auc(probs, labels),
        parity_gap=parity_gap(probs, attr),
        parity_gap_expected=parity_gap_expected(probs, attr),
        calibration_score=calibration_score(probs, labels, attr, k),
        calibration_k=k,
        n_group0=int(g0.sum()),
        n_group1=int(g1.sum()),
    )
