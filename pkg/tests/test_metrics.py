import numpy as np
import pytest
from scipy.special import expit

from fairadapt import semlab
from fairadapt.errors import DataError
from fairadapt.metrics import (
    accuracy,
    auc,
    calibration_score,
    evaluate,
    ks_two_sample,
    nde_estimate,
    parity_gap,
    parity_gap_expected,
)


class TestParityGap:
    def test_constant_predictor(self):
        attr = np.array([0, 0, 1, 1])
        assert parity_gap(np.ones(4), attr) == 0.0

    def test_indicator_of_group(self):
        attr = np.array([0, 0, 1, 1])
        assert parity_gap((attr == 0).astype(float), attr) == 1.0

    def test_probabilities_thresholded(self):
        attr = np.array([0, 0, 1, 1])
        probs = np.array([0.6, 0.7, 0.4, 0.45])
        assert parity_gap(probs, attr) == 1.0
        assert parity_gap_expected(probs, attr) == pytest.approx(0.225)

    def test_antisymmetry(self):
        rng = np.random.default_rng(0)
        attr = rng.integers(0, 2, 500)
        probs = rng.random(500)
        assert parity_gap(probs, attr) == pytest.approx(-parity_gap(probs, 1 - attr))

    def test_empty_group(self):
        with pytest.raises(DataError, match="nonempty"):
            parity_gap(np.ones(3), np.zeros(3))


class TestCalibration:
    def test_identical_groups(self):
        probs = np.tile([0.2, 0.8], 10)
        labels = np.tile([0, 1], 10)
        attr = np.repeat([0, 1], 10)
        assert calibration_score(probs, labels, attr, 4) == 0.0

    def test_k1_reduces_to_rate_difference(self):
        rng = np.random.default_rng(1)
        probs = rng.random(200)
        labels = rng.integers(0, 2, 200)
        attr = rng.integers(0, 2, 200)
        got = calibration_score(probs, labels, attr, 1)
        expected = abs(labels[attr == 0].mean() - labels[attr == 1].mean())
        assert got == pytest.approx(expected)

    def test_hand_example(self):
        # oracle: manual binning arithmetic with k=2
        probs = np.array([0.2, 0.3, 0.7, 0.9, 0.1, 0.4, 0.6, 0.8])
        labels = np.array([0, 1, 1, 1, 0, 0, 1, 0])
        attr = np.array([0, 0, 0, 0, 1, 1, 1, 1])
        assert calibration_score(probs, labels, attr, 2) == pytest.approx(0.5)

    def test_empty_bins_contribute_zero(self):
        probs = np.array([0.1, 0.1, 0.9, 0.9])
        labels = np.array([0, 0, 1, 1])
        attr = np.array([0, 0, 1, 1])
        # group 0 only occupies the bottom bin, group 1 only the top
        assert calibration_score(probs, labels, attr, 2) == 0.0

    def test_calibrated_predictor_trend(self):
        smp = semlab.sample(semlab.builtin("synthetic_a"), 20_000, seed=2)
        score = expit(sum(smp.data.values[f"X{i}"] for i in range(1, 6)))
        labels = smp.data.values["Y"]
        attr = smp.data.values["A"]
        scores = [calibration_score(score, labels, attr, k) for k in (2, 4, 8)]
        assert scores[1] <= scores[0] + 0.02
        assert scores[2] <= scores[1] + 0.02


class TestAuc:
    def test_perfect_separation(self):
        assert auc(np.array([0.1, 0.2, 0.8, 0.9]), np.array([0, 0, 1, 1])) == 1.0

    def test_null(self):
        rng = np.random.default_rng(3)
        probs = rng.random(10_000)
        labels = rng.integers(0, 2, 10_000)
        assert auc(probs, labels) == pytest.approx(0.5, abs=0.02)

    def test_four_point_instance(self):
        # oracle: exhaustive pair counting gives 3 wins of 4 pairs
        got = auc(np.array([0.1, 0.4, 0.35, 0.8]), np.array([0, 0, 1, 1]))
        assert got == 0.75

    def test_monotone_invariance(self):
        rng = np.random.default_rng(4)
        probs = rng.random(300)
        labels = rng.integers(0, 2, 300)
        assert auc(probs, labels) == pytest.approx(auc(expit(3 * probs - 1), labels))

    def test_single_class(self):
        with pytest.raises(DataError, match="both classes"):
            auc(np.array([0.5, 0.6]), np.array([1, 1]))


class TestKs:
    def test_identical_samples(self):
        x = np.arange(50.0)
        assert ks_two_sample(x, x).statistic == 0.0

    def test_disjoint_supports(self):
        assert ks_two_sample(np.zeros(20), np.ones(20)).statistic == 1.0

    def test_critical_value_formula(self):
        res = ks_two_sample(np.arange(2500.0), np.arange(2500.0))
        expected = np.sqrt(-np.log(0.005) * (5000) / (2 * 2500 * 2500))
        assert res.critical_01 == pytest.approx(expected)

    def test_null_rejection_rate(self):
        rng = np.random.default_rng(5)
        rejections = 0
        for _ in range(100):
            a = rng.normal(size=5000)
            b = rng.normal(size=5000)
            res = ks_two_sample(a, b)
            rejections += res.statistic >= res.critical_01
        assert rejections <= 2  # level-0.01 test

    def test_detects_shift(self):
        rng = np.random.default_rng(6)
        res = ks_two_sample(rng.normal(size=4000), rng.normal(size=4000) + 0.2)
        assert res.statistic > res.critical_01


class TestNde:
    def test_constant_predictor(self):
        sem = semlab.builtin("ripg_example")
        nde = nde_estimate(sem, lambda v: np.full_like(v["X"], 0.4), {"R"}, "0", 10_000, seed=1)
        assert nde == 0.0

    def test_unadapted_predictor_direct_effect(self):
        sem = semlab.builtin("ripg_example")
        # max-utility linear predictor Yhat = X/2 keeps the full shift
        nde = nde_estimate(sem, lambda v: 0.5 * v["X"], {"R"}, "0", 100_000, seed=2)
        assert nde == pytest.approx(0.25, abs=0.01)

    def test_adapted_predictor_vanishes(self):
        sem = semlab.builtin("ripg_example")

        def adapted_pred(vals):
            ft_x = vals["X"] - 0.5 * (vals["A"] == 0)
            return 0.5 * ft_x

        nde = nde_estimate(sem, adapted_pred, {"R"}, "0", 100_000, seed=3)
        assert abs(nde) < 0.005


class TestEvaluate:
    def test_report_fields(self):
        rng = np.random.default_rng(7)
        n = 2000
        attr = rng.integers(0, 2, n)
        probs = rng.random(n)
        labels = (rng.random(n) < probs).astype(float)
        report = evaluate(probs, labels, attr, k=5)
        assert report.calibration_k == 5
        assert 0 <= report.auc <= 1
        assert -1 <= report.parity_gap <= 1
        assert report.n_group0 + report.n_group1 == n
        text = report.to_json()
        assert "parity_gap_expected" in text

    def test_deterministic(self):
        rng = np.random.default_rng(8)
        probs = rng.random(500)
        labels = rng.integers(0, 2, 500)
        attr = rng.integers(0, 2, 500)
        r1 = evaluate(probs, labels, attr)
        r2 = evaluate(probs, labels, attr)
        assert r1 == r2

    def test_accuracy(self):
        assert accuracy(np.array([0.9, 0.2]), np.array([1, 1])) == 0.5
