"""Executable structural equation models with shared-quantile counterfactuals.

Each variable is generated from its parents and one latent quantile
coordinate, monotone nondecreasing in the quantile: Gaussian nodes map the
quantile through the inverse normal CDF, Bernoulli nodes through the
generalized inverse of their two-point law. Replaying the recorded quantile
matrix reproduces a sample exactly, and do-interventions simply pin
assignments, which makes these models the ground-truth oracle for the
adaptation pipeline: ``oracle_adapt`` is the population-exact counterpart of
the estimated adapter.

``builtin`` returns the handful of small models used throughout the tests
and experiment commands.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.special import expit, ndtri

from .data import CONTINUOUS, DISCRETE_ORDERED, ColumnSpec, Dataset
from .errors import DataError, GraphError
from .graph import CausalGraph

__all__ = [
    "Term",
    "Assignment",
    "Sem",
    "SampleWithQuantiles",
    "sample",
    "counterfactual",
    "oracle_adapt",
    "ripg_bound",
    "builtin",
    "BUILTIN_NAMES",
]

_U_EPS = 1e-15


@dataclass(frozen=True)
class Term:
    """One additive contribution: coef * parent, or coef * 1(parent == level)."""

    parent: str
    coef: float
    indicator_level: int | None = None

    def __call__(self, value: np.ndarray) -> np.ndarray:
        if self.indicator_level is None:
            return self.coef * value
        return self.coef * (value == self.indicator_level)


@dataclass(frozen=True)
class Assignment:
    """Structural assignment g(parents, u), monotone nondecreasing in u.

    ``kind`` is "gaussian" (identity link plus scale * ndtri(u) noise) or
    "bernoulli" (success probability = link(linear part), value = 1 exactly
    when u exceeds the failure mass).
    """

    kind: str
    terms: tuple[Term, ...] = ()
    intercept: float = 0.0
    scale: float = 1.0
    link: str = "identity"

    def linear_part(self, values: Mapping[str, np.ndarray]) -> np.ndarray:
        out = np.asarray(self.intercept, np.float64)
        for term in self.terms:
            out = out + term(values[term.parent])
        return out

    def evaluate(self, values: Mapping[str, np.ndarray], u: np.ndarray) -> np.ndarray:
        lin = self.linear_part(values)
        if self.kind == "gaussian":
            uu = np.clip(u, _U_EPS, 1.0 - _U_EPS)
            return lin + self.scale * ndtri(uu)
        if self.kind == "bernoulli":
            p1 = expit(lin) if self.link == "expit" else np.clip(lin, 0.0, 1.0)
            return (u > 1.0 - p1).astype(np.float64)
        raise DataError(f"unknown assignment kind {self.kind!r}")


@dataclass(frozen=True)
class Sem:
    """Causal graph plus one assignment and one column spec per node."""

    graph: CausalGraph
    assignments: Mapping[str, Assignment]
    column_specs: Mapping[str, ColumnSpec]
    baseline: str = "0"

    def __post_init__(self) -> None:
        for node in self.graph.nodes:
            if node not in self.assignments:
                raise GraphError(f"no assignment for node {node!r}")
            for term in self.assignments[node].terms:
                if term.parent not in self.graph.parents(node):
                    raise GraphError(
                        f"assignment for {node!r} uses non-parent {term.parent!r}"
                    )

    def node_index(self, name: str) -> int:
        return self.graph.nodes.index(name)

    def linear_betas(self) -> dict[tuple[str, str], float]:
        """Edge coefficients of the purely linear part (identity terms)."""
        betas: dict[tuple[str, str], float] = {}
        for node, assign in self.assignments.items():
            for term in assign.terms:
                if term.indicator_level is None:
                    betas[(term.parent, node)] = term.coef
        return betas


@dataclass(frozen=True)
class SampleWithQuantiles:
    """A dataset together with the latent quantile matrix that generated it."""

    data: Dataset
    quantiles: np.ndarray  # (n, len(graph.nodes)), columns in graph.nodes order
    sem: Sem

    def quantile(self, name: str) -> np.ndarray:
        return self.quantiles[:, self.sem.node_index(name)]


def _evaluate(
    sem: Sem, u: np.ndarray, interventions: Mapping[str, np.ndarray | float]
) -> dict[str, np.ndarray]:
    u = np.atleast_2d(np.asarray(u, np.float64))
    if u.shape[1] != len(sem.graph.nodes):
        raise DataError(
            f"quantile matrix has {u.shape[1]} columns, expected {len(sem.graph.nodes)}"
        )
    for name in interventions:
        if name not in sem.graph.nodes:
            raise GraphError(f"intervention on unknown variable {name!r}")
    n = u.shape[0]
    values: dict[str, np.ndarray] = {}
    for node in sem.graph.topological_order():
        if node in interventions:
            values[node] = np.broadcast_to(
                np.asarray(interventions[node], np.float64), (n,)
            ).copy()
        else:
            values[node] = sem.assignments[node].evaluate(
                values, u[:, sem.node_index(node)]
            )
    return values


def sample(sem: Sem, n: int, seed: int) -> SampleWithQuantiles:
    """n i.i.d. rows, generated in topological order with recorded quantiles."""
    if n < 1:
        raise DataError("n must be at least 1")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, 0x5E3])))
    u = rng.random((n, len(sem.graph.nodes)))
    values = _evaluate(sem, u, {})
    data = Dataset(sem.column_specs, values, baseline=sem.baseline)
    return SampleWithQuantiles(data=data, quantiles=u, sem=sem)


def counterfactual(
    sem: Sem, u: np.ndarray, interventions: Mapping[str, np.ndarray | float]
) -> dict[str, np.ndarray]:
    """Evaluate the SEM at quantiles u with intervened assignments pinned."""
    return _evaluate(sem, u, interventions)


def oracle_adapt(
    sem: Sem,
    smp: SampleWithQuantiles,
    resolving: set[str] | frozenset[str],
    baseline: str,
) -> Dataset:
    """Population-exact adaptation: replay each row's quantiles under the
    baseline attribute with resolvers pinned to their observed values."""
    resolving = frozenset(resolving)
    for r in resolving:
        if r not in sem.graph.nodes:
            raise GraphError(f"resolving set references unknown node {r!r}")
        if r not in sem.graph.descendants(sem.graph.protected):
            raise GraphError(
                f"resolving node {r!r} is not a descendant of the protected attribute"
            )
    base_code = smp.data.level_index(sem.graph.protected, baseline)
    interventions: dict[str, np.ndarray | float] = {sem.graph.protected: float(base_code)}
    for r in sorted(resolving):
        interventions[r] = smp.data.values[r]
    values = _evaluate(sem, smp.quantiles, interventions)
    return smp.data.with_values(values)


def ripg_bound(
    sem: Sem, resolving: set[str] | frozenset[str], baseline: str, n: int, seed: int
) -> float:
    """Monte-Carlo resolver-induced parity-gap bound.

    The outcome gap, in the baseline world, attributable solely to switching
    the resolvers between their two group-conditional values. Zero when no
    resolver influences the outcome.
    """
    attr = sem.graph.protected
    spec = sem.column_specs[attr]
    if spec.levels is None or len(spec.levels) != 2:
        raise DataError("ripg_bound expects a two-level protected attribute")
    base_code = float(spec.levels.index(baseline))
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, 0xB09D])))
    u = rng.random((int(n), len(sem.graph.nodes)))
    resolving = sorted(frozenset(resolving))
    outcome = sem.graph.outcome
    if not resolving:
        return 0.0
    world0 = _evaluate(sem, u, {attr: 0.0})
    world1 = _evaluate(sem, u, {attr: 1.0})
    iv0: dict[str, np.ndarray | float] = {attr: base_code}
    iv1: dict[str, np.ndarray | float] = {attr: base_code}
    for r in resolving:
        iv0[r] = world0[r]
        iv1[r] = world1[r]
    y_r0 = _evaluate(sem, u, iv0)[outcome]
    y_r1 = _evaluate(sem, u, iv1)[outcome]
    return float(np.mean(y_r0 - y_r1))


def _attr_spec() -> ColumnSpec:
    return ColumnSpec(kind=DISCRETE_ORDERED, role="attribute", levels=("0", "1"))


def _binary_outcome_spec() -> ColumnSpec:
    return ColumnSpec(kind=DISCRETE_ORDERED, role="outcome", levels=("0", "1"))


def _continuous(role: str = "feature") -> ColumnSpec:
    return ColumnSpec(kind=CONTINUOUS, role=role)


def _synthetic_a() -> Sem:
    xs = [f"X{i}" for i in range(1, 6)]
    graph = CausalGraph.build(
        nodes=["A", *xs, "Y"],
        edges=[("A", x) for x in xs] + [(x, "Y") for x in xs],
        protected="A",
        outcome="Y",
    )
    assigns = {"A": Assignment("bernoulli", intercept=0.5)}
    specs: dict[str, ColumnSpec] = {"A": _attr_spec()}
    for x in xs:
        assigns[x] = Assignment("gaussian", terms=(Term("A", -0.25),), intercept=0.125)
        specs[x] = _continuous()
    assigns["Y"] = Assignment(
        "bernoulli", terms=tuple(Term(x, 1.0) for x in xs), link="expit"
    )
    specs["Y"] = _binary_outcome_spec()
    return Sem(graph, assigns, specs)


def _synthetic_b() -> Sem:
    graph = CausalGraph.build(
        nodes=["A", "X1", "X2", "X3", "Y"],
        edges=[("A", "X1"), ("A", "X2"), ("X2", "X3"), ("X1", "Y"), ("X2", "Y"), ("X3", "Y")],
        protected="A",
        outcome="Y",
    )
    assigns = {
        "A": Assignment("bernoulli", intercept=0.5),
        "X1": Assignment("gaussian", terms=(Term("A", -0.25),), intercept=0.125),
        "X2": Assignment("gaussian", terms=(Term("A", -0.25),), intercept=0.125),
        "X3": Assignment("gaussian", terms=(Term("X2", 0.25),)),
        "Y": Assignment(
            "bernoulli", terms=(Term("X1", 1.0), Term("X2", 1.0), Term("X3", 1.0)), link="expit"
        ),
    }
    specs = {
        "A": _attr_spec(),
        "X1": _continuous(),
        "X2": _continuous(),
        "X3": _continuous(),
        "Y": _binary_outcome_spec(),
    }
    return Sem(graph, assigns, specs)


def _ripg_example() -> Sem:
    """Linear model with one resolver that has no causal effect on the
    outcome; the advantaged group (level 0) gets fixed shifts on X and R."""
    graph = CausalGraph.build(
        nodes=["A", "R", "X", "Y"],
        edges=[("A", "X"), ("A", "R"), ("X", "Y")],
        protected="A",
        outcome="Y",
    )
    assigns = {
        "A": Assignment("bernoulli", intercept=0.5),
        "X": Assignment("gaussian", terms=(Term("A", 0.5, indicator_level=0),)),
        "R": Assignment("gaussian", terms=(Term("A", 0.75, indicator_level=0),)),
        "Y": Assignment("gaussian", terms=(Term("X", 0.5),)),
    }
    specs = {
        "A": _attr_spec(),
        "R": _continuous(),
        "X": _continuous(),
        "Y": _continuous(role="outcome"),
    }
    return Sem(graph, assigns, specs)


def _appendix_b() -> Sem:
    """Two shifted covariates with small noise (variance 0.05) and a logistic
    outcome; used for the probability-vs-class prediction gap numbers."""
    scale = float(np.sqrt(0.05))
    graph = CausalGraph.build(
        nodes=["A", "X1", "X2", "Y"],
        edges=[("A", "X1"), ("A", "X2"), ("X1", "Y"), ("X2", "Y")],
        protected="A",
        outcome="Y",
    )
    assigns = {
        "A": Assignment("bernoulli", intercept=0.5),
        "X1": Assignment("gaussian", terms=(Term("A", 0.5, indicator_level=0),), scale=scale),
        "X2": Assignment(
            "gaussian", terms=(Term("A", 2.0 / 3.0, indicator_level=0),), intercept=-1.0 / 3.0, scale=scale
        ),
        "Y": Assignment("bernoulli", terms=(Term("X1", 1.0), Term("X2", 1.0)), link="expit"),
    }
    specs = {
        "A": _attr_spec(),
        "X1": _continuous(),
        "X2": _continuous(),
        "Y": _binary_outcome_spec(),
    }
    return Sem(graph, assigns, specs)


def _chain_example() -> Sem:
    """Linear chain with one direct shortcut edge; the coefficients are fixed
    artifact constants chosen to exercise multi-path coefficient sums."""
    graph = CausalGraph.build(
        nodes=["A", "X1", "X2", "Y"],
        edges=[("A", "X1"), ("X1", "X2"), ("A", "X2"), ("X2", "Y")],
        protected="A",
        outcome="Y",
    )
    assigns = {
        "A": Assignment("bernoulli", intercept=0.5),
        "X1": Assignment("gaussian", terms=(Term("A", 0.5),)),
        "X2": Assignment("gaussian", terms=(Term("X1", 0.8), Term("A", 0.3))),
        "Y": Assignment("gaussian", terms=(Term("X2", 1.0),)),
    }
    specs = {
        "A": _attr_spec(),
        "X1": _continuous(),
        "X2": _continuous(),
        "Y": _continuous(role="outcome"),
    }
    return Sem(graph, assigns, specs)


_BUILTINS = {
    "synthetic_a": _synthetic_a,
    "synthetic_b": _synthetic_b,
    "ripg_example": _ripg_example,
    "appendix_b": _appendix_b,
    "chain_example": _chain_example,
}
BUILTIN_NAMES = tuple(sorted(_BUILTINS))


def builtin(name: str) -> Sem:
    """One of the bundled models: synthetic_a, synthetic_b, ripg_example,
    appendix_b, chain_example."""
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise DataError(f"unknown builtin SEM {name!r}; choose from {BUILTIN_NAMES}")
    return factory()
