"""Acceptance gate: one test per release criterion, each at its stated
tolerance, printing a PASS line on success (run with -s to see them all).

The simulator lab provides the ground truth; estimated-pipeline criteria run
over fixed seeds so the whole gate is deterministic.
"""

import hashlib
import json

import numpy as np
import pytest
from scipy import integrate
from scipy.optimize import linprog
from scipy.special import expit

from fairadapt import semlab
from fairadapt.adapter import AdapterConfig, fit_and_adapt
from fairadapt.cli import main as cli_main
from fairadapt.experiments import appendix_b_demo, ripg_demo, run_pipeline, tradeoff_a, tradeoff_b
from fairadapt.forest import ForestParams, QuantileForest
from fairadapt.metrics import ks_two_sample, nde_estimate
from fairadapt.predictors import fairness_residual, fit_linear
from fairadapt.transport import (
    binary_rule,
    counterfactual_distribution,
    solve_monotone,
    solve_zero_one,
)


def report(criterion: str, detail: str):
    print(f"ACCEPTANCE PASS [{criterion}]: {detail}")


def test_c01_worked_transport_example():
    plan = solve_monotone([0.6, 0.4], [0.5, 0.5])
    row0 = counterfactual_distribution(plan, 0)
    assert abs(row0[0] - 5.0 / 6.0) <= 1e-12
    assert abs(row0[1] - 1.0 / 6.0) <= 1e-12
    report("1", "two-level plan row-0 conditional is (5/6, 1/6) to 1e-12")


def test_c02_binary_rule_grid():
    for i in range(1, 100):
        for j in range(1, 100):
            p0, p0p = i / 100.0, j / 100.0
            plan = solve_monotone([p0p, 1.0 - p0p], [p0, 1.0 - p0])
            row0 = counterfactual_distribution(plan, 0)
            stay, move = binary_rule(plan.target_marginal[0], plan.source_marginal[0])
            assert row0[0] == stay and row0[1] == move, (p0, p0p)
    report("2", "99x99 grid of binary marginals matches the two-level rule exactly")


def _lp_cost(source, target, cost):
    m = source.size
    a_eq = []
    for i in range(m):
        row = np.zeros((m, m))
        row[i, :] = 1.0
        a_eq.append(row.ravel())
    for j in range(m):
        col = np.zeros((m, m))
        col[:, j] = 1.0
        a_eq.append(col.ravel())
    res = linprog(
        cost.ravel(),
        A_eq=np.array(a_eq),
        b_eq=np.concatenate([source, target]),
        bounds=(0, None),
        method="highs",
    )
    assert res.success
    return res.fun


def test_c03_transport_optimality():
    rng = np.random.default_rng(2024)
    exponents = (1.5, 2.0, 3.0)
    for trial in range(500):
        m = int(rng.integers(2, 6))
        source = rng.dirichlet(np.ones(m))
        target = rng.dirichlet(np.ones(m))
        expo = exponents[trial % 3]
        plan = solve_monotone(source, target, exponent=expo)
        cost = np.abs(np.subtract.outer(np.arange(m), np.arange(m))) ** expo
        assert abs(plan.cost() - _lp_cost(source, target, cost)) <= 1e-9
        zo = solve_zero_one(source, target)
        tv = 0.5 * np.abs(source - target).sum()
        assert zo.off_diagonal_mass() == pytest.approx(tv, abs=1e-14)
    report("3", "500 random instances: monotone cost matches the LP oracle "
                "within 1e-9 and 0/1 off-diagonal mass equals TV")


def test_c04_optimal_predictor_gap():
    cols, rows = appendix_b_demo(n=100_000, seed=11)
    gap = rows[0]["expected_gap"]
    assert gap == pytest.approx(0.164, abs=0.02)

    def mean_expit(shift):  # quadrature oracle: E[expit(N(shift, 0.1))]
        g = lambda z: expit(z + shift) * np.exp(-z * z / 0.2) / np.sqrt(0.2 * np.pi)
        val, _ = integrate.quad(g, -12, 12, limit=200)
        return val

    expected = mean_expit(1.0 / 3.0) - mean_expit(-1.0 / 3.0)
    assert gap == pytest.approx(expected, abs=0.01)
    report("4", f"small-noise optimal-predictor gap {gap:.4f} within 0.164 +/- 0.02 "
                f"and within 0.01 of the quadrature value {expected:.4f}")


def test_c05_population_fairness_estimated():
    sem = semlab.builtin("synthetic_a")
    worst_ratio = 0.0
    worst_gap = 0.0
    for seed in range(1, 11):
        rep, probs, test = run_pipeline(sem, frozenset(), seed=seed, n_train=5000, n_test=5000)
        assert abs(rep.parity_gap) < 0.05, seed
        worst_gap = max(worst_gap, abs(rep.parity_gap))
        smp = semlab.sample(sem, 5000, seed=seed)
        adapter, adapted = fit_and_adapt(
            smp.data,
            sem.graph,
            AdapterConfig(baseline_level="0", forest_params=ForestParams(seed=seed), seed=seed),
        )
        a = smp.data.values["A"]
        for i in range(1, 6):
            col = adapted.values[f"X{i}"]
            ks = ks_two_sample(col[a == 0], col[a == 1])
            assert ks.statistic < ks.critical_01, (seed, i)
            worst_ratio = max(worst_ratio, ks.statistic / ks.critical_01)
    report(
        "5",
        f"10 seeds: every adapted covariate passes level-0.01 KS "
        f"(worst ratio {worst_ratio:.2f}); worst option-B parity gap {worst_gap:.3f} < 0.05",
    )


def _pooled_sd(s1, s2):
    return float(np.sqrt((s1**2 + s2**2) / 2.0))


def test_c06_tradeoff_trends():
    cols_a, rows_a = tradeoff_a(n=5000, repeats=10, seed=1)
    gaps = [r["parity_gap_mean"] for r in rows_a]
    cals = [r["calibration_mean"] for r in rows_a]
    gsds = [r["parity_gap_sd"] for r in rows_a]
    csds = [r["calibration_sd"] for r in rows_a]
    for i in range(len(rows_a) - 1):
        assert gaps[i + 1] >= gaps[i] - _pooled_sd(gsds[i], gsds[i + 1]), i
        assert cals[i + 1] <= cals[i] + _pooled_sd(csds[i], csds[i + 1]), i

    cols_b, rows_b = tradeoff_b(n=5000, repeats=10, seed=1)
    by_name = {r["resolving"]: r for r in rows_b}
    r12 = by_name["X1+X2"]
    r123 = by_name["X1+X2+X3"]
    for metric in ("auc", "parity_gap", "calibration"):
        diff = abs(r12[f"{metric}_mean"] - r123[f"{metric}_mean"])
        tol = _pooled_sd(r12[f"{metric}_sd"], r123[f"{metric}_sd"])
        assert diff <= tol, (metric, diff, tol)
    report(
        "6",
        "nested resolving sweep: parity gap nondecreasing and calibration "
        "nonincreasing within one pooled sd; {X1,X2} matches {X1,X2,X3}",
    )


def test_c07_linear_constraint():
    sem = semlab.builtin("chain_example")
    betas = sem.linear_betas()
    smp = semlab.sample(sem, 10_000, seed=5)
    raw = np.column_stack([smp.data.values["A"], smp.data.values["X1"], smp.data.values["X2"]])
    residuals = {}
    for resolving in (frozenset(), frozenset({"X1"})):
        adapted = semlab.oracle_adapt(sem, smp, resolving, "0")
        ft = np.column_stack([adapted.values["X1"], adapted.values["X2"]])
        model = fit_linear(ft, adapted.values["Y"])
        preds = model.predict(ft)
        # effective coefficients of the composed predictor on raw columns
        eff = fit_linear(raw, preds)
        res = fairness_residual(
            sem.graph,
            betas,
            resolving,
            {"X1": eff.coef[1], "X2": eff.coef[2]},
            eff.coef[0],
        )
        assert abs(res) < 0.05, (resolving, res)
        residuals[tuple(sorted(resolving))] = res
    report(
        "7",
        "least squares on exactly adapted linear data satisfies the "
        f"attribute-flip constraint: residuals {residuals}",
    )


def test_c08_nde():
    sem = semlab.builtin("ripg_example")
    smp = semlab.sample(sem, 20_000, seed=6)
    adapted = semlab.oracle_adapt(sem, smp, {"R"}, "0")
    ft_model = fit_linear(
        np.column_stack([adapted.values["X"], adapted.values["R"]]),
        adapted.values["Y"],
    )

    def adapted_pred(vals):
        ft_x = vals["X"] + 0.5 * (vals["A"] == 1)  # exact baseline-0 transform
        return ft_model.predict(np.column_stack([ft_x, vals["R"]]))

    maxutil = fit_linear(
        np.column_stack([smp.data.values["X"], smp.data.values["R"]]),
        smp.data.values["Y"],
    )

    def maxutil_pred(vals):
        return maxutil.predict(np.column_stack([vals["X"], vals["R"]]))

    nde_fair = nde_estimate(sem, adapted_pred, {"R"}, "0", 100_000, seed=6)
    nde_util = nde_estimate(sem, maxutil_pred, {"R"}, "0", 100_000, seed=6)
    assert abs(nde_fair) < 0.03
    assert nde_util > 0.1
    report("8", f"adapted predictor NDE {nde_fair:+.4f} (<0.03); "
                f"max-utility predictor NDE {nde_util:+.3f} (>0.1)")


def test_c09_ripg():
    cols, rows = ripg_demo(n=5000, repeats=10, seed=1)
    for row in rows:
        assert row["expected_gap"] <= row["ripg_bound"] + 0.03, row
    worst = max(r["expected_gap"] - r["ripg_bound"] for r in rows)
    report("9", f"10 seeds: option-B expected gap within bound + 0.03 "
                f"(worst excess {worst:+.4f})")


def test_c10_strong_fairness_agreement():
    sem = semlab.builtin("synthetic_a")
    smp = semlab.sample(sem, 10_000, seed=12)
    adapter, adapted = fit_and_adapt(
        smp.data,
        sem.graph,
        AdapterConfig(baseline_level="0", forest_params=ForestParams(seed=12), seed=12),
    )
    exact = semlab.oracle_adapt(sem, smp, set(), "0")
    nonbase = smp.data.values["A"] == 1
    deviations = []
    for i in range(1, 6):
        col = f"X{i}"
        dev = np.abs(adapted.values[col][nonbase] - exact.values[col][nonbase])
        deviations.append(np.median(dev))
    assert max(deviations) < 0.1
    report("10", f"per-row estimated vs exact counterfactuals: worst per-column "
                 f"median absolute deviation {max(deviations):.4f} < 0.1")


def test_c11_property_suite(tmp_path):
    # PIT uniformity and quantile monotonicity
    rng = np.random.default_rng(0)
    n = 10_000
    x = rng.normal(size=n)
    y = 2 * x + rng.normal(size=n)
    forest = QuantileForest(x[:, None], y, ForestParams(seed=1))
    xh = rng.normal(size=n)
    yh = 2 * xh + rng.normal(size=n)
    u = forest.conditional_cdf(xh[:, None], yh, rng.random(n))
    ks = np.abs(np.sort(u) - (np.arange(n) + 0.5) / n).max()
    assert ks < 0.03
    us = np.linspace(0, 1, 21)
    q = forest.conditional_quantile(np.tile([[0.7]], (us.size, 1)), us)
    assert (np.diff(q) >= 0).all()

    # exact invariances and determinism under thread counts
    sem = semlab.builtin("synthetic_b")
    smp = semlab.sample(sem, 2000, seed=2)
    graph = sem.graph.with_resolving({"X2"})
    cfg1 = AdapterConfig(baseline_level="0", forest_params=ForestParams(num_trees=30, seed=3), seed=3, threads=1)
    cfg4 = AdapterConfig(baseline_level="0", forest_params=ForestParams(num_trees=30, seed=3), seed=3, threads=4)
    _, a1 = fit_and_adapt(smp.data, graph, cfg1)
    _, a4 = fit_and_adapt(smp.data, graph, cfg4)
    base = smp.data.values["A"] == 0
    np.testing.assert_array_equal(a1.values["X2"], smp.data.values["X2"])
    for col in sem.graph.nodes:
        np.testing.assert_array_equal(a1.values[col][base], smp.data.values[col][base])
        np.testing.assert_array_equal(a1.values[col], a4.values[col])

    # CSV round trip through the CLI plus manifest replay digests
    sim = tmp_path / "sim"
    assert cli_main(["simulate", "--name", "synthetic_b", "--n", "400", "--seed", "4", "--out-dir", str(sim)]) == 0
    out1 = tmp_path / "run1"
    assert cli_main([
        "adapt", "--graph", str(sim / "graph.json"), "--meta", str(sim / "meta.json"),
        "--train", str(sim / "data.csv"), "--baseline", "0", "--seed", "6",
        "--num-trees", "15", "--out-dir", str(out1),
    ]) == 0
    out2 = tmp_path / "run2"
    assert cli_main(["replay", "--manifest", str(out1 / "manifest.json"), "--out-dir", str(out2)]) == 0
    d1 = hashlib.sha256((out1 / "train_adapted.csv").read_bytes()).hexdigest()
    d2 = hashlib.sha256((out2 / "train_adapted.csv").read_bytes()).hexdigest()
    assert d1 == d2

    from fairadapt.data import emit, ingest, serialize_metadata

    back = ingest(emit(smp.data), serialize_metadata(smp.data), sem.graph)
    for col in smp.data.columns:
        np.testing.assert_array_equal(back.values[col], smp.data.values[col])
    report("11", "PIT uniformity, monotonicity, exact invariances, thread "
                 "determinism, CSV round trip and manifest replay all hold")
