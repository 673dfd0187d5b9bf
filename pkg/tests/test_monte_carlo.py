"""Monte Carlo engine: sampling, pooling, row construction, agreement."""

from __future__ import annotations

import numpy as np
import pytest

from avgpower import (
    BetaPrior,
    BinomialModel,
    DegenerateWeightsError,
    GenericModel,
    LowEffectiveSampleError,
    McConfig,
    ParameterGrid,
    TestConfig,
    agreement_with_matrix,
    build_decision_matrix,
    make_binomial_plugin,
    mc_build_decision_row,
    mc_decision_rows,
    mc_sample_data,
    mc_sample_params,
    pool_samples,
)
from avgpower.distributions import beta_binom_pmf_support, binom_pmf
from avgpower.monte_carlo import agreement_csv


def binom_plugin(n: int = 20, a: float = 0.5, b: float = 0.5) -> GenericModel:
    return make_binomial_plugin(BinomialModel(n), BetaPrior(a, b))


def cfg(seed: int = 7, n_params: int = 300, n_data: int = 30, level: float = 0.05, **kw) -> McConfig:
    return McConfig(seed=seed, n_params=n_params, n_data_per_param=n_data, level=level, **kw)


class TestMcConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            cfg(seed=-1)
        with pytest.raises(ValueError):
            cfg(seed=2**64)
        with pytest.raises(ValueError):
            cfg(seed=1.5)
        with pytest.raises(ValueError):
            cfg(n_params=0)
        with pytest.raises(ValueError):
            cfg(n_data=0)
        with pytest.raises(ValueError):
            cfg(level=0.0)
        with pytest.raises(ValueError):
            cfg(ess_floor=-1.0)


class TestSampleParams:
    def test_reproducible(self):
        plugin = binom_plugin()
        a = mc_sample_params(plugin, cfg())
        b = mc_sample_params(plugin, cfg())
        assert a.params == b.params
        assert np.array_equal(a.weights, b.weights)
        c = mc_sample_params(plugin, cfg(seed=8))
        assert a.params != c.params

    def test_prior_proposal_unit_weights(self):
        sample = mc_sample_params(binom_plugin(), cfg())
        assert np.all(sample.weights == 1.0)

    def test_prior_mean_within_three_standard_errors(self):
        sample = mc_sample_params(binom_plugin(), cfg(n_params=2000))
        # Beta(0.5, 0.5): mean 1/2, variance 1/8.
        se = np.sqrt(0.125 / 2000)
        assert abs(np.mean(sample.params) - 0.5) <= 3 * se

    def test_weight_validation(self):
        base = binom_plugin()
        negative = GenericModel(
            likelihood=base.likelihood,
            sample_param=base.sample_param,
            sample_data=base.sample_data,
            prior_density_ratio=lambda theta: -1.0,
        )
        with pytest.raises(ValueError):
            mc_sample_params(negative, cfg())
        zero = GenericModel(
            likelihood=base.likelihood,
            sample_param=base.sample_param,
            sample_data=base.sample_data,
            prior_density_ratio=lambda theta: 0.0,
        )
        with pytest.raises(DegenerateWeightsError):
            mc_sample_params(zero, cfg())


class TestSampleData:
    def test_degenerate_parameter_gives_constant_draws(self):
        base = binom_plugin()
        at_zero = GenericModel(
            likelihood=base.likelihood,
            sample_param=lambda rng, x0: 0.0,
            sample_data=base.sample_data,
            prior_density_ratio=base.prior_density_ratio,
        )
        params = mc_sample_params(at_zero, cfg(n_params=5))
        data = mc_sample_data(at_zero, params, cfg(n_params=5))
        assert all(x == 0 for row in data.draws for x in row)

    def test_sample_mean_at_half(self):
        plugin = binom_plugin(n=100)
        fixed = GenericModel(
            likelihood=plugin.likelihood,
            sample_param=lambda rng, x0: 0.5,
            sample_data=plugin.sample_data,
            prior_density_ratio=plugin.prior_density_ratio,
        )
        config = cfg(n_params=100, n_data=100)
        params = mc_sample_params(fixed, config)
        data = mc_sample_data(fixed, params, config)
        values = [x for row in data.draws for x in row]
        assert abs(np.mean(values) - 50.0) <= 3 * 5.0 / np.sqrt(len(values))

    def test_deterministic_across_runs(self):
        plugin = binom_plugin()
        params = mc_sample_params(plugin, cfg())
        a = mc_sample_data(plugin, params, cfg())
        b = mc_sample_data(plugin, params, cfg())
        assert a.draws == b.draws


class TestPooling:
    def test_counts_and_order(self):
        plugin = binom_plugin()
        config = cfg()
        params = mc_sample_params(plugin, config)
        data = mc_sample_data(plugin, params, config)
        pooled = pool_samples(plugin, params, data)
        assert pooled.outcomes == sorted(set(x for row in data.draws for x in row))
        assert pooled.counts.sum() == config.n_params * config.n_data_per_param

    def test_mix_density_estimates_prior_predictive(self):
        plugin = binom_plugin()
        config = cfg(n_params=2000, n_data=5)
        params = mc_sample_params(plugin, config)
        data = mc_sample_data(plugin, params, config)
        pooled = pool_samples(plugin, params, data)
        bb = beta_binom_pmf_support(BinomialModel(20), BetaPrior(0.5, 0.5))
        lik = np.array([[plugin.likelihood(x, p) for x in pooled.outcomes] for p in params.params])
        se = lik.std(axis=0, ddof=1) / np.sqrt(config.n_params)
        for k, x in enumerate(pooled.outcomes):
            assert abs(pooled.mix_density[k] - bb[x]) <= 3 * se[k] + 1e-12

    def test_rejects_inconsistent_likelihood(self):
        plugin = binom_plugin()
        config = cfg(n_params=20, n_data=5)
        params = mc_sample_params(plugin, config)
        data = mc_sample_data(plugin, params, config)
        broken = GenericModel(
            likelihood=lambda x, theta: 0.0,
            sample_param=plugin.sample_param,
            sample_data=plugin.sample_data,
            prior_density_ratio=plugin.prior_density_ratio,
        )
        with pytest.raises(ValueError):
            pool_samples(broken, params, data)


class TestBuildRow:
    def pooled(self, plugin=None, config=None):
        plugin = plugin or binom_plugin()
        config = config or cfg()
        params = mc_sample_params(plugin, config)
        data = mc_sample_data(plugin, params, config)
        return plugin, config, pool_samples(plugin, params, data)

    def test_coverage_estimate_reaches_target(self):
        plugin, config, pooled = self.pooled()
        row = mc_build_decision_row(plugin, 0.41, pooled, config)
        assert row.estimated_coverage >= 1.0 - config.level
        assert row.threshold == pytest.approx(
            min(plugin.likelihood(x, 0.41) / pooled.mix_density[k] for k, x in enumerate(row.outcomes) if row.included[k])
        )

    def test_single_point_proposal_collapses_posterior(self):
        # Proposal concentrated at one parameter: the mixture equals the
        # null likelihood, every ratio is 1, and the single tie group admits
        # every sampled outcome.
        base = binom_plugin()
        degenerate = GenericModel(
            likelihood=base.likelihood,
            sample_param=lambda rng, x0: 0.35,
            sample_data=base.sample_data,
            prior_density_ratio=lambda theta: 1.0,
        )
        plugin, config, pooled = self.pooled(degenerate)
        row = mc_build_decision_row(degenerate, 0.35, pooled, config)
        assert np.all(row.included)
        assert row.threshold == pytest.approx(1.0, rel=1e-12)

    def test_level_near_one_keeps_single_tie_group(self):
        # Limiting behaviour of an extreme level: only the top tie group
        # survives, here a single outcome since the null is asymmetric.
        plugin, config, pooled = self.pooled()
        row = mc_build_decision_row(plugin, 0.3, pooled, cfg(level=1.0 - 1e-12))
        assert row.included.sum() == 1

    def test_ess_floor_trips(self):
        plugin, config, pooled = self.pooled()
        with pytest.raises(LowEffectiveSampleError):
            mc_build_decision_row(plugin, 0.41, pooled, cfg(ess_floor=1e18))

    def test_no_mass_at_null_is_degenerate(self):
        plugin, config, pooled = self.pooled()
        spiky = GenericModel(
            likelihood=lambda x, theta: 1.0 if x == 999 else 0.0,
            sample_param=plugin.sample_param,
            sample_data=plugin.sample_data,
            prior_density_ratio=plugin.prior_density_ratio,
        )
        with pytest.raises(DegenerateWeightsError):
            mc_build_decision_row(spiky, 0.41, pooled, config)


class TestAgreement:
    def small_grid(self) -> ParameterGrid:
        return ParameterGrid.regular(19, 0.05, 0.95)

    def test_rows_track_exact_matrix(self):
        grid = self.small_grid()
        plugin = binom_plugin()
        rows = mc_decision_rows(plugin, cfg(n_params=800, n_data=50), [float(e) for e in grid.points])
        exact = build_decision_matrix(TestConfig(0.05, BinomialModel(20), BetaPrior(0.5, 0.5), grid))
        report = agreement_with_matrix(rows, exact)
        assert report.per_eta.shape == (19,)
        assert np.all(report.per_eta >= 0.0) and np.all(report.per_eta <= 1.0)
        assert report.overall >= 0.9

    def test_alignment_errors(self):
        grid = self.small_grid()
        plugin = binom_plugin()
        small = cfg(n_params=50, n_data=5, ess_floor=5.0)
        rows = mc_decision_rows(plugin, small, [float(e) for e in grid.points])
        exact = build_decision_matrix(TestConfig(0.05, BinomialModel(20), BetaPrior(0.5, 0.5), grid))
        with pytest.raises(ValueError):
            agreement_with_matrix(rows[:-1], exact)
        shifted = mc_decision_rows(plugin, small, [float(e) + 1e-6 for e in grid.points])
        with pytest.raises(ValueError):
            agreement_with_matrix(shifted, exact)

    def test_agreement_csv(self):
        grid = self.small_grid()
        report_lines = agreement_csv(
            type("R", (), {"per_eta": np.linspace(0.9, 1.0, 19), "overall": 0.95})(), grid.points
        )
        lines = report_lines.splitlines()
        assert lines[0] == "eta,agreement"
        assert len(lines) == 20
