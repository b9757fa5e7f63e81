"""Classifiers and regressors trained on (adapted) tabular data.

Training option A fits on the original covariates and labels, option B on
the adapted covariates and adapted labels; either way predictions must be
produced from adapted covariates, and mixing original labels with adapted
covariates is refused. Probability predictions are the primary output; class
labels come from thresholding at 0.5.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .adapter import FittedAdapter, adapt_test
from .data import CATEGORICAL_UNORDERED, CONTINUOUS, Dataset
from .errors import DataError, NumericError
from .forest import ForestParams, ProbabilityForest
from .graph import CausalGraph, path_coefficient_sum

__all__ = [
    "LogisticModel",
    "LinearModel",
    "fit_logistic",
    "fit_linear",
    "design_matrix",
    "TrainedModel",
    "train",
    "predict_proba",
    "non_baseline_predict",
    "fairness_residual",
    "OPTION_A",
    "OPTION_B",
]

OPTION_A = "a"
OPTION_B = "b"


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class LogisticModel:
    coef: np.ndarray
    intercept: float
    n_iter: int
    converged: bool
    grad_norm: float
    losses: tuple[float, ...]

    @property
    def final_loss(self) -> float:
        return self.losses[-1]

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(np.asarray(X) @ self.coef + self.intercept)


def logistic_loss(coef, intercept, X, y, l2) -> float:
    z = X @ coef + intercept
    # log(1 + exp(-|z|)) + max(z,0) - z*y, numerically stable
    nll = np.logaddexp(0.0, z) - y * z
    return float(nll.mean() + 0.5 * l2 * np.dot(coef, coef))


def logistic_gradient(coef, intercept, X, y, l2) -> np.ndarray:
    p = _sigmoid(X @ coef + intercept)
    r = (p - y) / y.size
    return np.concatenate([[r.sum()], X.T @ r + l2 * coef])


def fit_logistic(
    X: np.ndarray,
    y: np.ndarray,
    l2: float = 1e-4,
    max_iter: int = 100,
    tol: float = 1e-8,
) -> LogisticModel:
    """Ridge-penalized logistic regression by damped Newton iterations.

    The intercept is unpenalized. Convergence means the gradient norm fell
    below ``tol``; with ``l2 = 0`` and separable data the fit is reported as
    non-converged instead of erroring.
    """
    X = np.asarray(X, np.float64)
    y = np.asarray(y, np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise DataError("features must be (n, p) and labels (n,), aligned")
    if not np.isin(y, (0.0, 1.0)).all():
        raise DataError("labels must be binary 0/1")
    if (y == 1).sum() < 2 or (y == 0).sum() < 2:
        raise DataError("need at least 2 rows of each class")
    if l2 < 0:
        raise DataError("l2 must be nonnegative")
    n, p = X.shape
    w = np.zeros(p + 1)  # intercept first
    Xb = np.concatenate([np.ones((n, 1)), X], axis=1)
    reg = np.concatenate([[0.0], np.full(p, l2)])
    losses = [logistic_loss(w[1:], w[0], X, y, l2)]
    grad_norm = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        z = Xb @ w
        prob = _sigmoid(z)
        grad = Xb.T @ (prob - y) / n + reg * w
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm < tol:
            it -= 1
            break
        s = np.maximum(prob * (1.0 - prob), 1e-12)
        hess = (Xb * s[:, None]).T @ Xb / n + np.diag(reg)
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            step = grad
        # halve until the loss does not increase
        t = 1.0
        for _ in range(30):
            cand = w - t * step
            cand_loss = logistic_loss(cand[1:], cand[0], X, y, l2)
            if cand_loss <= losses[-1]:
                break
            t *= 0.5
        w = w - t * step
        losses.append(logistic_loss(w[1:], w[0], X, y, l2))
    converged = grad_norm < tol
    if l2 == 0.0:
        # unpenalized separable data: the gradient vanishes only because the
        # probabilities saturate while coefficients run off to infinity
        z = Xb @ w
        separated = np.all((z > 0) == (y == 1)) and np.abs(z).min() > 10.0
        if separated:
            converged = False
    if not np.all(np.isfinite(w)):
        raise NumericError("logistic fit diverged; increase l2")
    return LogisticModel(
        coef=w[1:],
        intercept=float(w[0]),
        n_iter=it,
        converged=converged,
        grad_norm=grad_norm,
        losses=tuple(losses),
    )


@dataclass
class LinearModel:
    coef: np.ndarray
    intercept: float

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X) @ self.coef + self.intercept


def fit_linear(X: np.ndarray, y: np.ndarray) -> LinearModel:
    """Ordinary least squares with an intercept."""
    X = np.asarray(X, np.float64)
    y = np.asarray(y, np.float64)
    Xb = np.concatenate([np.ones((X.shape[0], 1)), X], axis=1)
    w, *_ = np.linalg.lstsq(Xb, y, rcond=None)
    return LinearModel(coef=w[1:], intercept=float(w[0]))


def design_matrix(
    data: Dataset, feature_cols: Sequence[str] | None = None
) -> tuple[np.ndarray, list[str]]:
    """Numeric design matrix: continuous and ordered columns pass through as
    values/codes, unordered categorical columns expand to one-hot blocks."""
    cols = list(feature_cols) if feature_cols is not None else list(data.features)
    blocks = []
    names: list[str] = []
    for c in cols:
        spec = data.schema[c]
        v = data.values[c]
        if spec.kind == CATEGORICAL_UNORDERED:
            onehot = np.zeros((data.n_rows, len(spec.levels)))
            onehot[np.arange(data.n_rows), v.astype(np.int64)] = 1.0
            blocks.append(onehot)
            names.extend(f"{c}={lvl}" for lvl in spec.levels)
        else:
            blocks.append(np.asarray(v, np.float64)[:, None])
            names.append(c)
    return np.concatenate(blocks, axis=1), names


def _raw_matrix(data: Dataset, cols: Sequence[str]) -> tuple[np.ndarray, list[int | None]]:
    out = np.empty((data.n_rows, len(cols)))
    flags: list[int | None] = []
    for j, c in enumerate(cols):
        out[:, j] = data.values[c]
        spec = data.schema[c]
        flags.append(len(spec.levels) if spec.kind == CATEGORICAL_UNORDERED else None)
    return out, flags


@dataclass
class TrainedModel:
    """A fitted downstream predictor bound to its feature columns.

    ``predict_proba`` consumes a dataset whose covariates must already be
    adapted; for continuous outcomes the "probability" is the regression
    prediction.
    """

    kind: str  # logistic | probability_forest | linear
    model: object
    feature_cols: tuple[str, ...]
    option: str

    def predict_proba(self, data: Dataset) -> np.ndarray:
        if self.kind == "probability_forest":
            X, _ = _raw_matrix(data, self.feature_cols)
            return self.model.predict_proba(X)[:, 1]
        X, _ = design_matrix(data, self.feature_cols)
        if self.kind == "logistic":
            return self.model.predict_proba(X)
        return self.model.predict(X)

    def predict_label(self, data: Dataset) -> np.ndarray:
        return (self.predict_proba(data) >= 0.5).astype(np.int64)


def train(
    option: str,
    adapter: FittedAdapter | None,
    train_data: Dataset,
    adapted_train: Dataset,
    model_kind: str = "logistic",
    l2: float = 1e-4,
    forest_params: ForestParams | None = None,
) -> TrainedModel:
    """Fit a downstream model under training option A or B.

    Option A uses the original covariates with the original labels, option B
    the adapted covariates with the adapted labels; covariates and labels
    never mix across worlds. Predictions afterwards must always be made on
    adapted covariates.
    """
    if option not in (OPTION_A, OPTION_B):
        raise DataError(f"training option must be '{OPTION_A}' or '{OPTION_B}'")
    if train_data.n_rows != adapted_train.n_rows:
        raise DataError("original and adapted training data are misaligned")
    if train_data.outcome is None:
        raise DataError("training data has no outcome column")
    source = train_data if option == OPTION_A else adapted_train
    outcome = source.schema[source.outcome]
    y = np.asarray(source.values[source.outcome], np.float64)
    cols = tuple(source.features)

    if outcome.kind == CONTINUOUS or model_kind == "linear":
        X, _ = design_matrix(source, cols)
        model = fit_linear(X, y)
        return TrainedModel("linear", model, cols, option)
    if outcome.levels is not None and len(outcome.levels) != 2:
        raise DataError("downstream classifiers expect a binary outcome")
    if model_kind == "logistic":
        X, _ = design_matrix(source, cols)
        model = fit_logistic(X, y, l2=l2)
        return TrainedModel("logistic", model, cols, option)
    if model_kind == "probability_forest":
        X, flags = _raw_matrix(source, cols)
        params = forest_params or ForestParams()
        model = ProbabilityForest(X, y.astype(np.int64), params, n_classes=2, categorical_levels=flags)
        return TrainedModel("probability_forest", model, cols, option)
    raise DataError(f"unknown model kind {model_kind!r}")


def predict_proba(model: TrainedModel, adapted_data: Dataset) -> np.ndarray:
    return model.predict_proba(adapted_data)


def train_cv(
    adapter: FittedAdapter,
    train_data: Dataset,
    adapted_train: Dataset,
    model_kind: str = "logistic",
    seed: int = 0,
    l2: float = 1e-4,
) -> tuple[str, TrainedModel, dict]:
    """Pick training option A or B on a held-out fifth of the rows.

    Both candidates are scored on adapted held-out covariates against the
    true labels; the option with the smaller absolute parity gap wins, ties
    going to the higher AUC. Both axes are returned so callers can overrule.
    """
    from .metrics import auc as _auc
    from .metrics import parity_gap as _gap

    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed & 0xFFFFFFFF, 0xCF])))
    perm = rng.permutation(train_data.n_rows)
    n_fit = int(round(train_data.n_rows * 0.8))
    fit_rows, val_rows = np.sort(perm[:n_fit]), np.sort(perm[n_fit:])
    diagnostics: dict = {}
    scores: dict[str, tuple[float, float]] = {}
    attr = train_data.values[train_data.attribute][val_rows]
    truth = np.asarray(train_data.values[train_data.outcome], np.float64)[val_rows]
    for option in (OPTION_A, OPTION_B):
        model = train(
            option,
            adapter,
            train_data.take(fit_rows),
            adapted_train.take(fit_rows),
            model_kind,
            l2=l2,
        )
        probs = model.predict_proba(adapted_train.take(val_rows))
        gap = abs(_gap(probs, attr))
        score_auc = _auc(probs, truth)
        scores[option] = (gap, -score_auc)
        diagnostics[option] = {"abs_parity_gap": gap, "auc": score_auc}
    best = min(scores, key=lambda o: scores[o])
    diagnostics["chosen"] = best
    model = train(best, adapter, train_data, adapted_train, model_kind, l2=l2)
    return best, model, diagnostics


def non_baseline_predict(
    adapter0: FittedAdapter,
    adapter1: FittedAdapter,
    train_data: Dataset,
    test_data: Dataset,
    l2: float = 1e-4,
) -> np.ndarray:
    """Two-world averaging predictor.

    Concatenates the two adapted versions of the covariates (one per
    baseline), fits one probability model per world on that shared design
    against the corresponding adapted labels, and returns the mean of the two
    predicted probabilities for each test row.
    """
    if adapter0.graph != adapter1.graph:
        raise DataError("adapters were fitted on different graphs")
    a0 = adapter0.train_adapted
    a1 = adapter1.train_adapted
    if a0.n_rows != a1.n_rows:
        raise DataError("adapters were fitted on different data")
    X0, _ = design_matrix(a0)
    X1, _ = design_matrix(a1)
    X_star = np.concatenate([X0, X1], axis=1)
    y0 = np.asarray(a0.values[a0.outcome], np.float64)
    y1 = np.asarray(a1.values[a1.outcome], np.float64)
    pi0 = fit_logistic(X_star, y0, l2=l2)
    pi1 = fit_logistic(X_star, y1, l2=l2)
    t0 = adapt_test(adapter0, test_data)
    t1 = adapt_test(adapter1, test_data)
    Xt0, _ = design_matrix(t0)
    Xt1, _ = design_matrix(t1)
    Xt = np.concatenate([Xt0, Xt1], axis=1)
    return (pi0.predict_proba(Xt) + pi1.predict_proba(Xt)) / 2.0


def fairness_residual(
    graph: CausalGraph,
    betas: Mapping[tuple[str, str], float],
    resolving,
    coef_by_name: Mapping[str, float],
    coef_attr: float,
) -> float:
    """Counterfactual prediction difference of a linear predictor under a
    protected-attribute flip with resolvers pinned.

    Zero exactly when the predictor satisfies the strong resolved-fairness
    constraint for a linear additive model: the attribute coefficient must
    cancel the coefficient-weighted resolver-avoiding path sums.
    """
    total = float(coef_attr)
    for name, alpha in coef_by_name.items():
        if name == graph.protected:
            continue
        total += float(alpha) * path_coefficient_sum(graph, betas, name, resolving)
    return total
