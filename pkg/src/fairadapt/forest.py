"""Random-forest conditional distribution estimators.

Two estimators share one tree builder:

* ``QuantileForest`` — regression trees whose leaves keep the training rows,
  giving a weighted empirical conditional distribution per query: latent
  quantiles via the randomized PIT and values via the generalized-inverse
  weighted quantile.
* ``ProbabilityForest`` — the same trees grown on one-hot responses (Gini
  gain), predicting conditional class distributions from leaf frequencies.

Split search is an exact variance-reduction scan over per-feature bins.
Features with few distinct values use exact thresholds; dense continuous
features are binned at quantile positions drawn independently per tree, so
split points vary across the ensemble and averaging smooths bin placement.
Trees are grown level-synchronously with histogram statistics, keeping the
fit a handful of numpy calls per depth. Unordered categorical features split
on level subsets after ordering levels by the node-local mean response.

Every tree owns a counter-based random stream derived from (seed, tree
index), so fits are reproducible and independent of worker-thread scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DataError

__all__ = [
    "ForestParams",
    "QuantileForest",
    "ProbabilityForest",
    "fit_quantile_forest",
    "fit_probability_forest",
    "conditional_cdf",
    "conditional_quantile",
]

MAX_BINS = 64
_TINY_U = 1e-12


@dataclass(frozen=True)
class ForestParams:
    """Forest hyperparameters; the seed fully determines training."""

    num_trees: int = 100
    min_node_size: int = 5
    features_per_split: int | str = "sqrt"
    bootstrap_fraction: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_trees < 1:
            raise DataError("num_trees must be positive")
        if self.min_node_size < 1:
            raise DataError("min_node_size must be positive")
        if isinstance(self.features_per_split, str):
            if self.features_per_split != "sqrt":
                raise DataError("features_per_split must be a positive int or 'sqrt'")
        elif self.features_per_split < 1:
            raise DataError("features_per_split must be a positive int or 'sqrt'")
        if not (0.0 < self.bootstrap_fraction <= 1.0):
            raise DataError("bootstrap_fraction must lie in (0, 1]")

    def mtry(self, n_features: int) -> int:
        if self.features_per_split == "sqrt":
            return max(1, math.ceil(math.sqrt(n_features)))
        return min(int(self.features_per_split), n_features)


class _Binner:
    """Feature coding: exact thresholds where possible, per-tree quantile
    boundaries for dense continuous columns, raw level codes for categorical
    ones."""

    def __init__(self, X: np.ndarray, categorical_levels: Sequence[int | None]):
        n, p = X.shape
        self.n_features = p
        self.is_cat = np.array([lv is not None for lv in categorical_levels], bool)
        self.fixed_bounds: list[np.ndarray | None] = []
        self.sorted_cols: list[np.ndarray | None] = []
        self.n_bins = np.empty(p, np.int64)
        for f in range(p):
            col = X[:, f]
            if self.is_cat[f]:
                n_levels = int(categorical_levels[f])
                if n_levels > MAX_BINS:
                    raise DataError(
                        f"categorical predictor {f} has {n_levels} levels; "
                        f"at most {MAX_BINS} supported"
                    )
                self.fixed_bounds.append(None)
                self.sorted_cols.append(None)
                self.n_bins[f] = max(n_levels, 1)
            else:
                uniq = np.unique(col)
                if uniq.size <= MAX_BINS:
                    bounds = (uniq[:-1] + uniq[1:]) / 2.0
                    self.fixed_bounds.append(bounds)
                    self.sorted_cols.append(None)
                    self.n_bins[f] = bounds.size + 1
                else:
                    self.fixed_bounds.append(None)
                    self.sorted_cols.append(np.sort(col))
                    self.n_bins[f] = MAX_BINS
        self.offsets = np.concatenate([[0], np.cumsum(self.n_bins)])
        self.total_bins = int(self.offsets[-1])

    def draw_boundaries(self, rng: np.random.Generator) -> list[np.ndarray | None]:
        """Per-tree boundary values for dense continuous features."""
        bounds: list[np.ndarray | None] = []
        for f in range(self.n_features):
            if self.sorted_cols[f] is None:
                bounds.append(self.fixed_bounds[f])
            else:
                col = self.sorted_cols[f]
                pos = np.sort(rng.random(MAX_BINS - 1))
                idx = (pos * (col.size - 1)).astype(np.int64)
                bounds.append(np.unique(col[idx]))
        return bounds

    def codes(self, X: np.ndarray, boundaries: list[np.ndarray | None]) -> np.ndarray:
        n, p = X.shape
        if p != self.n_features:
            raise DataError(
                f"schema mismatch: forest expects {self.n_features} predictors, got {p}"
            )
        out = np.empty((n, p), np.int16)
        for f in range(p):
            col = X[:, f]
            if self.is_cat[f]:
                c = col.astype(np.int64)
                if c.size and (c.min() < 0 or c.max() >= self.n_bins[f]):
                    raise DataError(
                        f"categorical predictor {f}: level code outside the "
                        f"{self.n_bins[f]} training levels"
                    )
                out[:, f] = c
            else:
                # out-of-range continuous values clamp to the support
                out[:, f] = np.searchsorted(boundaries[f], col, side="left")
        return out


@dataclass
class _Tree:
    boundaries: list
    feature: np.ndarray  # -1 at leaves
    cut: np.ndarray  # bin threshold, or row into cat_masks for subset splits
    is_cat: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf_index: np.ndarray
    cat_masks: np.ndarray  # (n_cat_splits, max_bins) bool
    # all-training-row leaf membership, filled after growth
    rows_by_leaf: np.ndarray = field(default=None)
    leaf_offsets: np.ndarray = field(default=None)
    inv_leaf_size: np.ndarray = field(default=None)

    @property
    def n_leaves(self) -> int:
        return int(self.leaf_offsets.size - 1)

    def apply(self, codes: np.ndarray) -> np.ndarray:
        """Leaf index for each row of a code matrix."""
        nid = np.zeros(codes.shape[0], np.int64)
        while True:
            feat = self.feature[nid]
            live = np.nonzero(feat >= 0)[0]
            if live.size == 0:
                break
            cur = nid[live]
            c = codes[live, self.feature[cur]].astype(np.int64)
            cut = self.cut[cur]
            go_left = np.empty(live.size, bool)
            num = ~self.is_cat[cur]
            go_left[num] = c[num] <= cut[num]
            catm = ~num
            if catm.any():
                go_left[catm] = self.cat_masks[cut[catm], c[catm]]
            nid[live] = np.where(go_left, self.left[cur], self.right[cur])
        return self.leaf_index[nid]


def _grow_tree(
    codes: np.ndarray,
    offsets: np.ndarray,
    n_bins: np.ndarray,
    is_cat_feat: np.ndarray,
    Y: np.ndarray,
    weights: np.ndarray,
    mtry: int,
    min_node: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray, list[np.ndarray]]:
    """Level-synchronous histogram growth on the bootstrap-weighted rows."""
    n, p = codes.shape
    d = Y.shape[1]
    total_bins = int(offsets[-1])
    max_bf = int(n_bins.max())

    act = np.nonzero(weights > 0)[0]
    w_live = weights[act].astype(np.float64)
    wy_live = Y[act] * w_live[:, None]
    comb_live = codes[act].astype(np.int64) + offsets[:-1][None, :]
    code_live = codes[act]
    node_live = np.zeros(act.size, np.int64)

    feature = np.full(1, -1, np.int64)
    cut = np.zeros(1, np.int64)
    is_cat_split = np.zeros(1, bool)
    left = np.full(1, -1, np.int64)
    right = np.full(1, -1, np.int64)
    cat_masks: list[np.ndarray] = []
    open_ids = np.zeros(1, np.int64)

    while open_ids.size and node_live.size:
        m = open_ids.size
        slot_of = np.full(feature.size, -1, np.int64)
        slot_of[open_ids] = np.arange(m)
        srow = slot_of[node_live]

        key = (srow[:, None] * total_bins + comb_live).ravel()
        cnt = np.bincount(
            key, weights=np.repeat(w_live, p), minlength=m * total_bins
        ).reshape(m, total_bins)
        sums = np.empty((m, total_bins, d))
        for j in range(d):
            sums[:, :, j] = np.bincount(
                key, weights=np.repeat(wy_live[:, j], p), minlength=m * total_bins
            ).reshape(m, total_bins)

        best_gain = np.full((m, p), -np.inf)
        best_cut = np.zeros((m, p), np.int64)
        orders: dict[int, np.ndarray] = {}
        tot_c = None
        for f in range(p):
            bf = int(n_bins[f])
            if bf < 2:
                continue
            sl = slice(int(offsets[f]), int(offsets[f]) + bf)
            c = cnt[:, sl]
            s = sums[:, sl, :]
            if tot_c is None:
                tot_c = c.sum(axis=1)
                tot_s = s.sum(axis=1)
                parent = (tot_s**2).sum(axis=1) / np.maximum(tot_c, 1e-300)
            if is_cat_feat[f]:
                with np.errstate(divide="ignore", invalid="ignore"):
                    level_key = np.where(c > 0, s[:, :, -1] / c, np.inf)
                order = np.argsort(level_key, axis=1, kind="stable")
                orders[f] = order
                c = np.take_along_axis(c, order, axis=1)
                s = np.take_along_axis(s, order[:, :, None], axis=1)
            cum_c = np.cumsum(c, axis=1)[:, :-1]
            cum_s = np.cumsum(s, axis=1)[:, :-1, :]
            valid = (cum_c >= min_node) & ((tot_c[:, None] - cum_c) >= min_node)
            with np.errstate(divide="ignore", invalid="ignore"):
                gain = (cum_s**2).sum(axis=2) / cum_c + (
                    (tot_s[:, None, :] - cum_s) ** 2
                ).sum(axis=2) / (tot_c[:, None] - cum_c)
            gain[~valid] = -np.inf
            best_cut[:, f] = np.argmax(gain, axis=1)
            best_gain[:, f] = gain[np.arange(m), best_cut[:, f]]

        if tot_c is None:
            break

        if mtry < p:
            u = rng.random((m, p))
            kth = np.partition(u, mtry - 1, axis=1)[:, mtry - 1 : mtry]
            selected = u <= kth
        else:
            selected = np.ones((m, p), bool)
        masked = np.where(selected, best_gain, -np.inf)
        f_star = np.argmax(masked, axis=1)
        g_star = masked[np.arange(m), f_star]
        do_split = (g_star - parent) > 1e-12 * np.maximum(1.0, np.abs(parent))
        split_slots = np.nonzero(do_split)[0]
        if split_slots.size == 0:
            break

        f_sp = f_star[split_slots]
        t_sp = best_cut[split_slots, f_sp]
        iscat_sp = is_cat_feat[f_sp]
        cut_sp = t_sp.copy()
        level_mask = np.zeros((m, max_bf), bool)
        for k in np.nonzero(iscat_sp)[0]:  # rare: subset splits only
            f = int(f_sp[k])
            mask = np.zeros(int(n_bins[f]), bool)
            mask[orders[f][split_slots[k], : int(t_sp[k]) + 1]] = True
            cut_sp[k] = len(cat_masks)
            cat_masks.append(mask)
            level_mask[split_slots[k], : mask.size] = mask

        n_split = split_slots.size
        base = feature.size
        left_ids = base + 2 * np.arange(n_split, dtype=np.int64)
        right_ids = left_ids + 1
        grow = 2 * n_split
        feature = np.concatenate([feature, np.full(grow, -1, np.int64)])
        cut = np.concatenate([cut, np.zeros(grow, np.int64)])
        is_cat_split = np.concatenate([is_cat_split, np.zeros(grow, bool)])
        left = np.concatenate([left, np.full(grow, -1, np.int64)])
        right = np.concatenate([right, np.full(grow, -1, np.int64)])
        gids = open_ids[split_slots]
        feature[gids] = f_sp
        cut[gids] = cut_sp
        is_cat_split[gids] = iscat_sp
        left[gids] = left_ids
        right[gids] = right_ids

        # partition live rows of split nodes into the children
        slot_feat = np.zeros(m, np.int64)
        slot_thresh = np.zeros(m, np.int64)
        slot_iscat = np.zeros(m, bool)
        slot_left = np.zeros(m, np.int64)
        slot_right = np.zeros(m, np.int64)
        slot_feat[split_slots] = f_sp
        slot_thresh[split_slots] = t_sp
        slot_iscat[split_slots] = iscat_sp
        slot_left[split_slots] = left_ids
        slot_right[split_slots] = right_ids

        in_split = do_split[srow]
        idx = np.nonzero(in_split)[0]
        s_sel = srow[idx]
        c_sel = code_live[idx, slot_feat[s_sel]].astype(np.int64)
        go_left = np.where(
            slot_iscat[s_sel],
            level_mask[s_sel, np.minimum(c_sel, max_bf - 1)],
            c_sel <= slot_thresh[s_sel],
        )
        node_live = np.where(go_left, slot_left[s_sel], slot_right[s_sel])
        w_live = w_live[idx]
        wy_live = wy_live[idx]
        comb_live = comb_live[idx]
        code_live = code_live[idx]
        open_ids = np.concatenate([left_ids, right_ids])

    leaf_index = np.full(feature.size, -1, np.int64)
    leaves = np.nonzero(feature < 0)[0]
    leaf_index[leaves] = np.arange(leaves.size)
    return feature, cut, is_cat_split, left, right, leaf_index, cat_masks


class _BaseForest:
    """Shared fitting machinery; subclasses add prediction semantics."""

    def __init__(
        self,
        X: np.ndarray,
        Y: np.ndarray,
        params: ForestParams,
        categorical_levels: Sequence[int | None] | None,
        threads: int = 1,
    ):
        X = np.asarray(X, np.float64)
        if X.ndim != 2:
            raise DataError("predictor matrix must be 2-d")
        n, p = X.shape
        if n < 2 * params.min_node_size:
            raise DataError(
                f"too few rows: {n} < 2*min_node_size = {2 * params.min_node_size}"
            )
        if categorical_levels is None:
            categorical_levels = [None] * p
        self.params = params
        self.n_rows = n
        self.binner = _Binner(X, categorical_levels)
        self._X = X
        self._Y = np.asarray(Y, np.float64)
        # key that orders rows within each leaf block (responses for the
        # quantile forest, anything stable otherwise)
        self._sort_key = getattr(self, "_block_sort_key", np.zeros(n))
        mtry = params.mtry(p)
        min_node = params.min_node_size
        n_draw = max(1, int(round(params.bootstrap_fraction * n)))
        max_bf = int(self.binner.n_bins.max())

        def build(t: int) -> _Tree:
            rng = np.random.Generator(
                np.random.Philox(np.random.SeedSequence([params.seed & 0xFFFFFFFF, t]))
            )
            draws = rng.integers(0, n, size=n_draw)
            w = np.bincount(draws, minlength=n).astype(np.float64)
            bounds = self.binner.draw_boundaries(rng)
            codes = self.binner.codes(X, bounds)
            feature, cut, is_cat, lft, rgt, leaf_index, masks = _grow_tree(
                codes,
                self.binner.offsets,
                self.binner.n_bins,
                self.binner.is_cat,
                self._Y,
                w,
                mtry,
                min_node,
                rng,
            )
            tree = _Tree(
                boundaries=bounds,
                feature=feature,
                cut=cut,
                is_cat=is_cat,
                left=lft,
                right=rgt,
                leaf_index=leaf_index,
                cat_masks=(
                    np.stack([np.pad(mk, (0, max_bf - mk.size)) for mk in masks])
                    if masks
                    else np.zeros((1, max_bf), bool)
                ),
            )
            # every training row contributes to the leaf it falls into;
            # blocks are kept response-sorted for binary-search lookups
            leaf_of = tree.apply(codes)
            n_leaves = int(tree.leaf_index.max()) + 1
            order = np.lexsort((self._sort_key, leaf_of))
            sizes = np.bincount(leaf_of, minlength=n_leaves)
            tree.rows_by_leaf = order
            tree.leaf_offsets = np.concatenate([[0], np.cumsum(sizes)])
            tree.inv_leaf_size = 1.0 / np.maximum(sizes, 1)
            return tree

        indices = range(params.num_trees)
        if threads and threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                self.trees = list(pool.map(build, indices))
        else:
            self.trees = [build(t) for t in indices]

    def _query_leaves(self, X: np.ndarray) -> np.ndarray:
        """(num_trees, k) leaf ids for a query matrix."""
        X = np.asarray(X, np.float64)
        return np.stack(
            [t.apply(self.binner.codes(X, t.boundaries)) for t in self.trees]
        )

    def query_weights(self, X: np.ndarray) -> np.ndarray:
        """Dense (k, n_train) leaf-averaged weight matrix.

        Diagnostic helper (weights are nonnegative and rows sum to 1); the
        prediction paths never materialize it.
        """
        leaf_ids = self._query_leaves(np.atleast_2d(np.asarray(X, np.float64)))
        T, k = leaf_ids.shape
        w = np.zeros((k, self.n_rows))
        for t, tree in enumerate(self.trees):
            lid = leaf_ids[t]
            for q in range(k):
                block = tree.rows_by_leaf[
                    tree.leaf_offsets[lid[q]] : tree.leaf_offsets[lid[q] + 1]
                ]
                w[q, block] += tree.inv_leaf_size[lid[q]]
        return w / T


class QuantileForest(_BaseForest):
    """Conditional-distribution estimator for a continuous response.

    For a query x the forest induces nonnegative weights over the training
    responses (summing to 1); ``conditional_cdf`` evaluates the weighted
    empirical CDF with randomized-PIT jitter, ``conditional_quantile`` its
    generalized inverse (smallest response with cumulative weight >= u).
    """

    def __init__(self, X, y, params, categorical_levels=None, threads=1):
        y = np.asarray(y, np.float64)
        if y.ndim != 1:
            raise DataError("response must be 1-d")
    def __init__(self, X, y, params, categorical_levels=None, threads=1):
        y = np.asarray(y, np.float64)
        if y.ndim != 1:
            raise DataError("response must be 1-d")
        self._block_sort_key = y
        super().__init__(X, y[:, None], params, categorical_levels, threads)
        self.y = y
        self._y_sorted = np.sort(y)
        # all trees' response-sorted leaf blocks, concatenated tree-major
        self._all_block_vals = np.concatenate(
            [y[tree.rows_by_leaf] for tree in self.trees]
        )

    def _block_bounds(self, X: np.ndarray):
        """Per (tree, query) leaf block bounds into the concatenated block
        array, plus the per-tree leaf weights (already divided by T)."""
        leaf_ids = self._query_leaves(X)
        T, k = leaf_ids.shape
        lo = np.empty((T, k), np.int64)
        hi = np.empty((T, k), np.int64)
        wts = np.empty((T, k))
        for t, tree in enumerate(self.trees):
            lid = leaf_ids[t]
            lo[t] = tree.leaf_offsets[lid] + t * self.n_rows
            hi[t] = tree.leaf_offsets[lid + 1] + t * self.n_rows
            wts[t] = tree.inv_leaf_size[lid]
        return lo, hi, wts / T

    def _weight_cdf(self, bounds, y: np.ndarray, inclusive: bool) -> np.ndarray:
        """Total query weight on training rows with response < y (or <= y),
        via simultaneous binary search in every response-sorted leaf block."""
        lo0, hi0, wts = bounds
        lo = lo0.copy()
        hi = hi0.copy()
        vals = self._all_block_vals
        yb = np.broadcast_to(y, lo.shape)
        active = lo < hi
        while active.any():
            mid = (lo + hi) >> 1
            v = vals[np.where(active, mid, 0)]
            go = ((v <= yb) if inclusive else (v < yb)) & active
            lo = np.where(go, mid + 1, lo)
            hi = np.where(active & ~go, mid, hi)
            active = lo < hi
        return ((lo - lo0) * wts).sum(axis=0)

    def conditional_cdf(self, X, y, jitter) -> np.ndarray:
        """Randomized PIT: F(y-|x) + jitter * (F(y|x) - F(y-|x)).

        With jitter pinned to 1 this is the right-continuous weighted
        empirical CDF.
        """
        X, y, scalar = _rows(X, y)
        jitter = np.broadcast_to(np.asarray(jitter, np.float64), y.shape)
        if np.any(jitter < 0) or np.any(jitter > 1):
            raise DataError("jitter draws must lie in [0, 1]")
        bounds = self._block_bounds(X)
        f_right = self._weight_cdf(bounds, y, inclusive=True)
        f_left = self._weight_cdf(bounds, y, inclusive=False)
        out = np.clip(f_left + jitter * (f_right - f_left), 0.0, 1.0)
        return float(out[0]) if scalar else out

    def conditional_quantile(self, X, u) -> np.ndarray:
        """Smallest training response whose cumulative query weight >= u."""
        X, u, scalar = _rows(X, u)
        if np.any(u < 0) or np.any(u > 1):
            raise DataError("u must lie in [0, 1]")
        bounds = self._block_bounds(X)
        # u=0 means the weighted support minimum; u=1 must reach the support
        # maximum even when the total weight sums to just under 1
        lo0, hi0, wts = bounds
        totals = ((hi0 - lo0) * wts).sum(axis=0)
        uu = np.minimum(np.maximum(u, _TINY_U), totals)
        n = self.n_rows
        lo = np.zeros(u.shape, np.int64)
        hi = np.full(u.shape, n, np.int64)
        while np.any(lo < hi):
            mid = (lo + hi) >> 1
            w = self._weight_cdf(bounds, self._y_sorted[np.minimum(mid, n - 1)], inclusive=True)
            ge = w >= uu
            hi = np.where(ge & (lo < hi), mid, hi)
            lo = np.where(~ge & (lo < hi), mid + 1, lo)
        out = self._y_sorted[np.minimum(lo, n - 1)]
        return float(out[0]) if scalar else out


class ProbabilityForest(_BaseForest):
    """Conditional class-distribution estimator for a leveled response."""

    def __init__(self, X, labels, params, n_classes=None, categorical_levels=None, threads=1):
        labels = np.asarray(labels, np.int64)
        if labels.ndim != 1:
            raise DataError("labels must be 1-d")
        if labels.size and labels.min() < 0:
            raise DataError("labels must be nonnegative level codes")
        self.n_classes = int(n_classes if n_classes is not None else labels.max() + 1)
        if self.n_classes == 2:
            # two-class Gini gain is an affine function of the variance
            # reduction on the class-1 indicator, so one response column does
            Y = labels.astype(np.float64)[:, None]
        else:
            Y = np.zeros((labels.size, self.n_classes))
            Y[np.arange(labels.size), labels] = 1.0
        super().__init__(X, Y, params, categorical_levels, threads)
        self.labels = labels
        self._leaf_freq = []
        for tree in self.trees:
            leaf_of = np.empty(self.n_rows, np.int64)
            leaf_of[tree.rows_by_leaf] = np.repeat(
                np.arange(tree.n_leaves), np.diff(tree.leaf_offsets)
            )
            freq = np.zeros((tree.n_leaves, self.n_classes))
            np.add.at(freq, (leaf_of, labels), 1.0)
            freq /= np.maximum(freq.sum(axis=1, keepdims=True), 1.0)
            self._leaf_freq.append(freq)

    def predict_proba(self, X) -> np.ndarray:
        X = np.asarray(X, np.float64)
        scalar = X.ndim == 1
        if scalar:
            X = X[None, :]
        leaf_ids = self._query_leaves(X)
        probs = np.zeros((X.shape[0], self.n_classes))
        for t, freq in enumerate(self._leaf_freq):
            probs += freq[leaf_ids[t]]
        probs /= len(self.trees)
        return probs[0] if scalar else probs


def _rows(X, v):
    X = np.asarray(X, np.float64)
    scalar = X.ndim == 1
    if scalar:
        X = X[None, :]
    v = np.atleast_1d(np.asarray(v, np.float64))
    if v.size == 1 and X.shape[0] > 1:
        v = np.full(X.shape[0], float(v[0]))
    if v.shape[0] != X.shape[0]:
        raise DataError(f"got {X.shape[0]} predictor rows but {v.shape[0]} values")
    return X, v, scalar


def fit_quantile_forest(
    predictors, response, params: ForestParams, categorical_levels=None, threads: int = 1
) -> QuantileForest:
    return QuantileForest(predictors, response, params, categorical_levels, threads)


def fit_probability_forest(
    predictors, labels, params: ForestParams, n_classes=None, categorical_levels=None, threads: int = 1
) -> ProbabilityForest:
    return ProbabilityForest(predictors, labels, params, n_classes, categorical_levels, threads)


def conditional_cdf(forest: QuantileForest, x, y, jitter) -> np.ndarray:
    return forest.conditional_cdf(x, y, jitter)


def conditional_quantile(forest: QuantileForest, x, u) -> np.ndarray:
    return forest.conditional_quantile(x, u)
