import json

import numpy as np
import pytest

from explomax import (
    DomainError,
    EstimatorSpec,
    InvalidLoss,
    LossSpec,
    Params,
    StudyConfig,
    estimated_risk,
    generate_censored_sample,
    ml_fit,
    mixture_cdf,
    standard_estimators,
    run_study,
)
from conftest import BENCH_TRUTH


class TestGenerate:
    def test_no_censoring(self):
        s = generate_censored_sample(BENCH_TRUTH, 50, 1e12, np.random.default_rng(0))
        assert s.r == 50

    def test_full_censoring(self):
        s = generate_censored_sample(BENCH_TRUTH, 50, 1e-12, np.random.default_rng(0))
        assert s.r == 0

    def test_censoring_fraction(self):
        s = generate_censored_sample(BENCH_TRUTH, 100_000, 0.4, np.random.default_rng(8))
        expected = 1 - mixture_cdf(0.4, BENCH_TRUTH)
        assert expected == pytest.approx(0.028069, abs=1e-6)
        assert abs(s.n_censored / s.n - expected) < 0.003

    def test_fixed_composition(self):
        s = generate_censored_sample(BENCH_TRUTH, 100, 1e12, np.random.default_rng(1), composition="fixed")
        assert (s.r1, s.r2) == (40, 60)

    def test_unknown_composition(self):
        with pytest.raises(DomainError):
            generate_censored_sample(BENCH_TRUTH, 10, 0.4, 0, composition="stratified")


class TestRisk:
    def test_zero_at_truth(self):
        for loss in (LossSpec(), LossSpec.entropy(1.2), LossSpec.entropy(-0.7)):
            assert estimated_risk([3.0, 3.0], 3.0, loss) == 0.0

    def test_symmetric_self(self):
        assert estimated_risk([4.0, 6.0], 5.0, LossSpec()) == pytest.approx(1.0)

    def test_gelf_value(self):
        direct = 1.1**1.2 - 1.2 * np.log(1.1) - 1
        assert estimated_risk([1.1], 1.0, LossSpec.entropy(1.2)) == pytest.approx(direct, rel=1e-12)
        assert direct == pytest.approx(0.0067971, abs=5e-8)

    def test_gelf_nonnegative(self, rng):
        est = rng.uniform(0.01, 10, 1000)
        for c in (-2.0, -0.1, 0.5, 3.0):
            assert np.all(LossSpec.entropy(c)(1.0, est) >= 0)

    def test_gelf_c_zero(self):
        with pytest.raises(InvalidLoss):
            estimated_risk([1.0], 1.0, LossSpec("GELF", 0.0))

    def test_empty(self):
        with pytest.raises(DomainError):
            estimated_risk([], 1.0, LossSpec())


class TestSpecs:
    def test_labels(self):
        assert EstimatorSpec("ml").label == "ML/SELF"
        assert EstimatorSpec("bayes", "uniform").label == "BayesClosed/uniform/SELF"
        assert EstimatorSpec("is", "jeffreys", LossSpec.entropy(1.2)).label == "BayesIS/jeffreys/GELF(c=1.2)"

    def test_ml_has_no_prior(self):
        with pytest.raises(DomainError):
            EstimatorSpec("ml", "uniform")

    def test_standard_columns(self):
        labels = [s.label for s in standard_estimators(("uniform", "jeffreys"))]
        assert labels == [
            "ML/SELF",
            "BayesIS/uniform/SELF",
            "BayesClosed/uniform/SELF",
            "BayesIS/jeffreys/SELF",
            "BayesClosed/jeffreys/SELF",
        ]

    @pytest.mark.parametrize(
        "kw", [dict(reps=0), dict(n=1), dict(censor_time=0.0), dict(seed=-1), dict(alpha=1.0), dict(estimators=())]
    )
    def test_config_validation(self, kw):
        base = dict(true_params=BENCH_TRUTH, n=20, censor_time=0.4, reps=2, seed=1, estimators=standard_estimators())
        base.update(kw)
        with pytest.raises(DomainError):
            StudyConfig(**base)

    def test_duplicate_estimators(self):
        with pytest.raises(DomainError):
            StudyConfig(BENCH_TRUTH, 20, 0.4, 2, 1, [EstimatorSpec("ml"), EstimatorSpec("ml")])


class TestRunStudy:
    def config(self, **kw):
        base = dict(
            true_params=BENCH_TRUTH, n=30, censor_time=0.4, reps=12, seed=5,
            estimators=standard_estimators(("uniform", "jeffreys"), (LossSpec(), LossSpec.entropy(1.2))),
            is_M=300, predictive_priors=("uniform", "jeffreys"),
        )
        base.update(kw)
        return StudyConfig(**base)

    def test_single_replication_equals_fit(self):
        cfg = StudyConfig(BENCH_TRUTH, 60, 1e9, 1, 3, [EstimatorSpec("ml")])
        rep = run_study(cfg)
        sample = generate_censored_sample(BENCH_TRUTH, 60, 1e9, np.random.default_rng(np.random.SeedSequence(3, spawn_key=(0, 0))))
        est, _ = ml_fit(sample, 1.0)
        np.testing.assert_array_equal(rep.cells["ML/SELF"]["mean"], est.as_array())

    def test_counts_and_nonnegative_risks(self):
        rep = run_study(self.config())
        for cell in rep.cells.values():
            assert cell["used"] + cell["skipped"] == 12
            assert all(r >= 0 for r in cell["risk"])
        for cell in rep.predictive.values():
            assert cell["used"] + cell["skipped"] == 12

    def test_skips_are_tallied(self):
        # n = 3 leaves a component empty in most replications
        rep = run_study(self.config(n=3, reps=30, predictive_priors=()))
        cell = rep.cells["ML/SELF"]
        assert cell["skipped"] > 0 and cell["used"] + cell["skipped"] == 30

    def test_deterministic_across_workers(self):
        cfg = self.config()
        a = run_study(cfg).to_json()
        b = run_study(cfg).to_json()
        c = run_study(cfg, n_jobs=2).to_json()
        assert a == b == c

    def test_seed_matters(self):
        assert run_study(self.config(seed=1)).to_json() != run_study(self.config(seed=2)).to_json()

    def test_outputs(self):
        rep = run_study(self.config(reps=3), keep_raw=True)
        data = json.loads(rep.to_json())
        assert set(data) == {"config", "cells", "predictive"}
        assert "wall_time" in rep.to_dict(include_timing=True)
        table = rep.to_table()
        assert "ML/GELF(c=1.2)" in table and "risk" in table and "jeffreys" in table
        assert rep.raw["ML/SELF"].shape == (3, 3)

    @pytest.mark.slow
    def test_risk_decreases_with_n(self):
        risks = {}
        for n in (25, 200):
            cfg = StudyConfig(BENCH_TRUTH, n, 0.4, 1000, 77, [EstimatorSpec("ml")])
            risks[n] = np.array(run_study(cfg).cells["ML/SELF"]["risk"])
        assert np.all(risks[200] < risks[25])
