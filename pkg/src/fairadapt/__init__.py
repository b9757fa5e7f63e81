"""Quantile-preserving fair data adaptation on a known causal graph.

The package adapts tabular data so that downstream classifiers trained on it
satisfy population-level fairness with respect to a protected attribute,
with resolving variables and edge-specific relaxations controlling how much
attribute influence is considered legitimate. Continuous variables move by
conditional-quantile matching (quantile regression forests), discrete ones
by discrete optimal transport between group-conditional laws; a simulator
lab provides exact population counterparts for validation.
"""

__version__ = "0.1.0"

from .adapter import AdapterConfig, FittedAdapter, adapt_test, fit_and_adapt, order_categorical
from .data import (
    CATEGORICAL_UNORDERED,
    CONTINUOUS,
    DISCRETE_ORDERED,
    ColumnSpec,
    Dataset,
    emit,
    ingest,
    parse_metadata,
    serialize_metadata,
    split,
)
from .errors import (
    DataError,
    FairadaptError,
    GraphError,
    NumericError,
    TransportError,
    ZeroMassRowError,
)
from .forest import (
    ForestParams,
    ProbabilityForest,
    QuantileForest,
    conditional_cdf,
    conditional_quantile,
    fit_probability_forest,
    fit_quantile_forest,
)
from .graph import CausalGraph, parse_graph, path_coefficient_sum, serialize
from .metrics import (
    EvalReport,
    KsResult,
    accuracy,
    auc,
    calibration_score,
    evaluate,
    ks_two_sample,
    nde_estimate,
    parity_gap,
    parity_gap_expected,
)
from .predictors import (
    OPTION_A,
    OPTION_B,
    LinearModel,
    LogisticModel,
    TrainedModel,
    design_matrix,
    fairness_residual,
    fit_linear,
    fit_logistic,
    non_baseline_predict,
    train,
    train_cv,
)
from .semlab import (
    Assignment,
    SampleWithQuantiles,
    Sem,
    Term,
    builtin,
    counterfactual,
    oracle_adapt,
    ripg_bound,
    sample,
)
from .transport import (
    TransportPlan,
    binary_rule,
    counterfactual_distribution,
    sample_counterfactual,
    solve_monotone,
    solve_zero_one,
)

__all__ = [name for name in dir() if not name.startswith("_")]
