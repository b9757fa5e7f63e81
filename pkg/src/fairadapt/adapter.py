"""Sample-level fair adaptation over a causal DAG.

Every non-resolving descendant of the protected attribute is revisited in
topological order. Continuous variables get their latent conditional
quantile extracted (randomized PIT against a quantile forest that includes
the attribute as a predictor) and are re-materialized at the same quantile in
the baseline world, where parents enter with adapted values when they belong
to the variable's adaptation parent set and with their original values
otherwise. Leveled variables couple the observed-world and baseline-world
conditional laws through discrete optimal transport and sample the
counterfactual level from the plan row of the observed value. Baseline-group
rows, resolving variables and non-descendants are never touched; the
protected column itself is rewritten to the baseline level.

The outcome is adapted on training data only; test-set adaptation reuses the
fitted estimators and leaves any outcome column untouched.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import _rand
from .data import CATEGORICAL_UNORDERED, CONTINUOUS, Dataset
from .errors import DataError, ZeroMassRowError
from .forest import ForestParams, ProbabilityForest, QuantileForest
from .graph import CausalGraph
from .transport import (
    counterfactual_distribution,
    sample_counterfactual,
    solve_monotone,
    solve_zero_one,
)

logger = logging.getLogger(__name__)

__all__ = [
    "AdapterConfig",
    "FittedAdapter",
    "fit_and_adapt",
    "adapt_test",
    "order_categorical",
]

_ORDERINGS = ("auto", "declared", "none")


@dataclass(frozen=True)
class AdapterConfig:
    """Adaptation run configuration.

    ``baseline_level`` defaults to the dataset's declared baseline;
    ``categorical_ordering`` picks how unordered categorical variables are
    handled: "auto" derives an outcome-rate ordering, "declared" trusts the
    metadata level order, "none" keeps them unordered and couples them with
    the 0/1-cost transport.
    """

    baseline_level: str | None = None
    forest_params: ForestParams = field(default_factory=ForestParams)
    seed: int = 0
    categorical_ordering: str = "auto"
    threads: int = 1

    def __post_init__(self) -> None:
        if self.categorical_ordering not in _ORDERINGS:
            raise DataError(
                f"categorical_ordering must be one of {_ORDERINGS}, "
                f"got {self.categorical_ordering!r}"
            )


@dataclass
class _VariableFit:
    name: str
    is_continuous: bool
    predictor_cols: tuple[str, ...]
    aps: frozenset[str]
    forest: QuantileForest | ProbabilityForest
    ordered_transport: bool = True
    sigma: np.ndarray | None = None  # level code -> ordered rank
    sigma_inv: np.ndarray | None = None


@dataclass
class FittedAdapter:
    """Fitted per-variable estimators plus the adapted training data."""

    graph: CausalGraph
    config: AdapterConfig
    baseline_level: str
    baseline_code: int
    adapt_order: tuple[str, ...]
    fits: dict[str, _VariableFit]
    train_adapted: Dataset
    train_quantiles: dict[str, np.ndarray]
    sigmas: dict[str, np.ndarray]
    zero_mass_fallbacks: int = 0


def order_categorical(
    column: np.ndarray,
    outcome: np.ndarray,
    attr: np.ndarray,
    baseline_code: int,
    levels: tuple[str, ...],
) -> np.ndarray:
    """Outcome-rate ordering of unordered levels.

    Returns sigma with sigma[code] = rank, ranking levels by the
    baseline-group positive-outcome rate ascending; ties break by level
    frequency, then by level label. Levels missing from the baseline group
    fall back to their overall rate; levels absent from the data fall back to
    the global positive rate.
    """
    outcome = np.asarray(outcome)
    if not np.isin(outcome, (0, 1)).all():
        raise DataError("categorical ordering needs a binary outcome")
    column = np.asarray(column)
    base = attr == baseline_code
    if not base.any():
        raise DataError("baseline group is empty")
    overall_rate = float(outcome.mean())
    keys = []
    for code, label in enumerate(levels):
        in_level = column == code
        in_both = in_level & base
        if in_both.any():
            rate = float(outcome[in_both].mean())
        elif in_level.any():
            rate = float(outcome[in_level].mean())
        else:
            rate = overall_rate
        keys.append((rate, int(in_level.sum()), label, code))
    sigma = np.empty(len(levels), np.int64)
    for rank, (_, _, _, code) in enumerate(sorted(keys)):
        sigma[code] = rank
    return sigma


def _check_order_transfers(
    name: str,
    sigma: np.ndarray,
    column: np.ndarray,
    outcome: np.ndarray,
    attr: np.ndarray,
    base_code: int,
) -> None:
    """The monotone coupling implicitly assumes the non-baseline group's
    outcome rates are also increasing along the chosen ordering; that is not
    enforceable, so violations are logged rather than fatal."""
    other = attr != base_code
    rates = []
    for code in np.argsort(sigma):  # walk levels in rank order
        rows = other & (column == code)
        if rows.any():
            rates.append(float(outcome[rows].mean()))
    if any(b < a - 1e-12 for a, b in zip(rates, rates[1:])):
        logger.warning(
            "ordering of %r: non-baseline outcome rates are not monotone "
            "along the baseline-group ordering (%s)",
            name,
            ", ".join(f"{r:.3f}" for r in rates),
        )


def _predictor_cols(graph: CausalGraph, name: str) -> tuple[str, ...]:
    parents = set(graph.parents(name))
    cols = [v for v in graph.topological_order() if v in parents]
    if graph.protected not in parents:
        cols.append(graph.protected)
    return tuple(cols)


def _matrix(
    values: Mapping[str, np.ndarray],
    cols: tuple[str, ...],
    sigmas: Mapping[str, np.ndarray],
) -> np.ndarray:
    out = np.empty((next(iter(values.values())).shape[0], len(cols)))
    for j, c in enumerate(cols):
        v = values[c]
        out[:, j] = sigmas[c][v.astype(np.int64)] if c in sigmas else v
    return out


def _categorical_flags(
    data: Dataset, cols: tuple[str, ...], sigmas: Mapping[str, np.ndarray]
) -> list[int | None]:
    flags: list[int | None] = []
    for c in cols:
        spec = data.schema[c]
        if spec.kind == CATEGORICAL_UNORDERED and c not in sigmas:
            flags.append(len(spec.levels))
        else:
            flags.append(None)
    return flags


def _counterfactual_levels(
    p_obs: np.ndarray,
    p_base: np.ndarray,
    observed: np.ndarray,
    draws: np.ndarray,
    ordered: bool,
) -> tuple[np.ndarray, int]:
    """Per-row transport solve and inverse-CDF sampling; returns new levels
    and the number of zero-mass fallbacks taken."""
    solver = solve_monotone if ordered else solve_zero_one
    out = np.empty(observed.size, np.int64)
    fallbacks = 0
    for i in range(observed.size):
        plan = solver(p_obs[i], p_base[i])
        level = int(observed[i])
        try:
            dist = counterfactual_distribution(plan, level)
        except ZeroMassRowError:
            fallbacks += 1
            dist = _fallback_distribution(plan, level, ordered)
        out[i] = sample_counterfactual(dist, draws[i])
    return out, fallbacks


def _fallback_distribution(plan, level: int, ordered: bool) -> np.ndarray:
    row_mass = plan.plan.sum(axis=1)
    if ordered:
        positive = np.nonzero(row_mass > 0)[0]
        nearest = positive[np.argmin(np.abs(positive - level))]
        return plan.plan[nearest] / row_mass[nearest]
    col_positive = plan.target_marginal > 0
    dist = col_positive / col_positive.sum()
    return dist


def fit_and_adapt(
    train: Dataset, graph: CausalGraph, config: AdapterConfig
) -> tuple[FittedAdapter, Dataset]:
    """Fit per-variable estimators on training data and adapt it in place.

    Baseline-group rows come through unchanged; the protected column is
    rewritten to the baseline level for everyone; resolving variables and
    non-descendants of the protected attribute are copied verbatim.
    """
    if train.is_test or train.outcome is None:
        raise DataError("training data must carry the outcome column")
    for node in graph.nodes:
        if node not in train.schema:
            raise DataError(f"dataset missing column for graph node {node!r}")
    baseline = config.baseline_level or train.baseline
    if baseline is None:
        raise DataError("no baseline level: set AdapterConfig.baseline_level")
    base_code = train.level_index(graph.protected, baseline)
    attr = train.values[graph.protected]
    nonbase = np.nonzero(attr != base_code)[0]

    adapt_order = tuple(
        v
        for v in graph.topological_order()
        if v in graph.descendants(graph.protected) and v not in graph.resolving
    )

    # outcome-rate orderings for unordered categorical variables
    sigmas: dict[str, np.ndarray] = {}
    if config.categorical_ordering != "none":
        for name in graph.nodes:
            spec = train.schema[name]
            if spec.kind != CATEGORICAL_UNORDERED:
                continue
            if config.categorical_ordering == "declared":
                sigmas[name] = np.arange(len(spec.levels), dtype=np.int64)
            else:
                sigmas[name] = order_categorical(
                    train.values[name],
                    train.values[train.outcome],
                    attr,
                    base_code,
                    spec.levels,
                )
            _check_order_transfers(
                name, sigmas[name], train.values[name],
                train.values[train.outcome], attr, base_code,
            )

    adapted: dict[str, np.ndarray] = {n: v.copy() for n, v in train.values.items()}
    adapted[graph.protected] = np.full(train.n_rows, base_code, np.int64)

    fits: dict[str, _VariableFit] = {}
    quantiles: dict[str, np.ndarray] = {}
    fallback_total = 0
    for name in adapt_order:
        spec = train.schema[name]
        cols = _predictor_cols(graph, name)
        aps = frozenset(graph.aps(name))
        parents = frozenset(graph.parents(name))
        x_obs = _matrix(train.values, cols, sigmas)
        x_base = _baseline_matrix(
            train.values, adapted, cols, sigmas, graph.protected, parents, aps
        )
        cat_flags = _categorical_flags(train, cols, sigmas)
        try:
            if spec.kind == CONTINUOUS:
                y = train.values[name]
                forest = QuantileForest(
                    x_obs, y, config.forest_params, cat_flags, config.threads
                )
                jitter = _rand.uniforms(config.seed, "pit", name, n=train.n_rows)
                u = forest.conditional_cdf(x_obs, y, jitter)
                quantiles[name] = u
                new_vals = y.copy()
                if nonbase.size:
                    new_vals[nonbase] = forest.conditional_quantile(
                        x_base[nonbase], u[nonbase]
                    )
                adapted[name] = new_vals
                fits[name] = _VariableFit(name, True, cols, aps, forest)
            else:
                sig = sigmas.get(name)
                codes = train.values[name].astype(np.int64)
                resp = sig[codes] if sig is not None else codes
                n_levels = len(spec.levels)
                forest = ProbabilityForest(
                    x_obs,
                    resp,
                    config.forest_params,
                    n_classes=n_levels,
                    categorical_levels=cat_flags,
                    threads=config.threads,
                )
                draws = _rand.uniforms(config.seed, "transport", name, n=train.n_rows)
                quantiles[name] = draws
                ordered = spec.kind != CATEGORICAL_UNORDERED or sig is not None
                new_vals = codes.copy()
                if nonbase.size:
                    p_obs = forest.predict_proba(x_obs[nonbase])
                    p_base = forest.predict_proba(x_base[nonbase])
                    moved, fallbacks = _counterfactual_levels(
                        p_obs, p_base, resp[nonbase], draws[nonbase], ordered
                    )
                    fallback_total += fallbacks
                    if sig is not None:
                        inv = np.argsort(sig)
                        new_vals[nonbase] = inv[moved]
                    else:
                        new_vals[nonbase] = moved
                adapted[name] = new_vals
                fits[name] = _VariableFit(
                    name,
                    False,
                    cols,
                    aps,
                    forest,
                    ordered_transport=ordered,
                    sigma=sig,
                    sigma_inv=np.argsort(sig) if sig is not None else None,
                )
        except DataError as exc:
            raise DataError(f"variable {name!r}: {exc}") from exc

    train_adapted = train.with_values(adapted)
    adapter = FittedAdapter(
        graph=graph,
        config=config,
        baseline_level=baseline,
        baseline_code=base_code,
        adapt_order=adapt_order,
        fits=fits,
        train_adapted=train_adapted,
        train_quantiles=quantiles,
        sigmas=sigmas,
        zero_mass_fallbacks=fallback_total,
    )
    return adapter, train_adapted


def _baseline_matrix(
    original: Mapping[str, np.ndarray],
    adapted: Mapping[str, np.ndarray],
    cols: tuple[str, ...],
    sigmas: Mapping[str, np.ndarray],
    protected: str,
    parents: frozenset[str],
    aps: frozenset[str],
) -> np.ndarray:
    """Baseline-world query rows: adapted values for parents in the
    adaptation parent set, original values otherwise. The appended attribute
    coordinate (when the attribute is not itself a parent) always switches to
    the baseline level, because it encodes the conditioning world rather than
    a causal edge; when the attribute is a real parent its treatment follows
    the adaptation parent set like any other edge."""
    n = next(iter(original.values())).shape[0]
    out = np.empty((n, len(cols)))
    for j, c in enumerate(cols):
        if c in aps or (c == protected and c not in parents):
            v = adapted[c]  # adapted attribute column is the baseline code
        else:
            v = original[c]
        out[:, j] = sigmas[c][v.astype(np.int64)] if c in sigmas else v
    return out


def adapt_test(adapter: FittedAdapter, test: Dataset) -> Dataset:
    """Adapt covariates of test data with the train-fitted estimators.

    The outcome column, if present, passes through untouched. Randomization
    draws come from (seed, variable, test row position), independent of the
    training draws.
    """
    graph = adapter.graph
    for node in graph.nodes:
        if node == graph.outcome:
            continue
        if node not in test.schema:
            raise DataError(f"test data missing column for graph node {node!r}")
    attr = test.values[graph.protected]
    nonbase = np.nonzero(attr != adapter.baseline_code)[0]
    adapted: dict[str, np.ndarray] = {n: v.copy() for n, v in test.values.items()}
    adapted[graph.protected] = np.full(test.n_rows, adapter.baseline_code, np.int64)
    for name in adapter.adapt_order:
        if name == graph.outcome:
            continue
        fit = adapter.fits[name]
        x_obs = _matrix(test.values, fit.predictor_cols, adapter.sigmas)
        x_base = _baseline_matrix(
            test.values,
            adapted,
            fit.predictor_cols,
            adapter.sigmas,
            graph.protected,
            frozenset(graph.parents(name)),
            fit.aps,
        )
        if fit.is_continuous:
            y = test.values[name]
            jitter = _rand.uniforms(adapter.config.seed, "pit", name, "test", n=test.n_rows)
            u = fit.forest.conditional_cdf(x_obs, y, jitter)
            new_vals = y.copy()
            if nonbase.size:
                new_vals[nonbase] = fit.forest.conditional_quantile(
                    x_base[nonbase], u[nonbase]
                )
            adapted[name] = new_vals
        else:
            codes = test.values[name].astype(np.int64)
            resp = fit.sigma[codes] if fit.sigma is not None else codes
            draws = _rand.uniforms(
                adapter.config.seed, "transport", name, "test", n=test.n_rows
            )
            new_vals = codes.copy()
            if nonbase.size:
                p_obs = fit.forest.predict_proba(x_obs[nonbase])
                p_base = fit.forest.predict_proba(x_base[nonbase])
                moved, fallbacks = _counterfactual_levels(
                    p_obs, p_base, resp[nonbase], draws[nonbase], fit.ordered_transport
                )
                adapter.zero_mass_fallbacks += fallbacks
                if fit.sigma_inv is not None:
                    new_vals[nonbase] = fit.sigma_inv[moved]
                else:
                    new_vals[nonbase] = moved
            adapted[name] = new_vals
    return test.with_values(adapted)
