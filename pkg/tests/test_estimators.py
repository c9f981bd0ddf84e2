import json

import numpy as np
import pytest
from scipy import stats

from conftest import empty_subgroups, fixture_counts
from oracles import mpp_quadrature
from snsmart_pp.errors import ConfigError
from snsmart_pp.estimators import (McmcConfig, PosteriorSummary, bjsm_fit, effective_sample_size,
                                   fit_fixed_delta, fit_power_prior, mpp_fit, posterior_shapes,
                                   summarize_draws)
from snsmart_pp.estimators.bjsm import _bjsm_chain
from snsmart_pp.numerics import RngStream
from snsmart_pp.simulator import builtin_scenario, simulate_trial
from snsmart_pp.trial_data import SubgroupCounts, TrialCounts, pool_subgroups
from snsmart_pp.weights import DeltaPair, PriorConfig

PRIOR = PriorConfig()
SHORT = McmcConfig(burn_in=500, kept_samples=2000)


def stage1_only(n1, z1):
    n1, z1 = np.asarray(n1), np.asarray(z1)
    m = np.zeros((3, 3), int)
    for k in range(3):
        m[k, (k + 1) % 3] = n1[k] - z1[k]
    return TrialCounts(n1, z1, np.zeros(3), m, np.zeros((3, 3)))


def conjugate_means(c, prior=PRIOR):
    return (c.z1 + prior.a_pi) / (c.n1 + prior.a_pi + prior.b_pi)


class TestFixedDelta:
    def test_stage1_only(self):
        c = stage1_only([30, 30, 30], [3, 9, 12])
        r = fit_fixed_delta(c, pool_subgroups(c), (0.0, 0.0), PRIOR)
        assert r.diagnostics["posterior_shapes"]["A"] == [4.0, 28.0]
        assert r.pi_hat[0] == 0.125
        s = r.summaries["pi_A"]
        assert s.lower == pytest.approx(stats.beta.ppf(0.025, 4, 28), abs=1e-12)
        assert s.upper == pytest.approx(stats.beta.ppf(0.975, 4, 28), abs=1e-12)
        assert s.sd == pytest.approx(stats.beta.std(4, 28), abs=1e-14)

    def test_half_weights(self):
        c = stage1_only([30, 30, 30], [3, 9, 12])
        sub = SubgroupCounts([[3, 10], [9, 10], [12, 10]], [[2, 2], [3, 3], [4, 4]])
        r = fit_fixed_delta(c, sub, DeltaPair(0.5, 0.5), PRIOR)
        assert r.diagnostics["posterior_shapes"]["A"] == [6.0, 32.5]
        assert r.pi_hat[0] == pytest.approx(6 / 38.5, abs=1e-15)
        assert r.pi_hat[0] == pytest.approx(0.15584, abs=1e-5)

    def test_full_pooling(self, scenario1_counts):
        c = scenario1_counts
        sub = pool_subgroups(c)
        r = fit_fixed_delta(c, sub, (1.0, 1.0), PRIOR)
        z = c.z1 + sub.z2.sum(axis=1)
        n = c.n1 + sub.n2.sum(axis=1)
        np.testing.assert_allclose(r.pi_hat, (z + 1) / (n + 2), rtol=0, atol=1e-15)

    @pytest.mark.parametrize("i", range(6))
    def test_monotone_in_counts(self, i):
        c = fixture_counts(i)
        sub = pool_subgroups(c)
        d = (0.4, 0.7)
        base = fit_fixed_delta(c, sub, d, PRIOR).pi_hat
        for k in range(3):
            for j in range(2):
                if sub.z2[k, j] < sub.n2[k, j]:
                    z2 = sub.z2.copy()
                    z2[k, j] += 1
                    up = fit_fixed_delta(c, SubgroupCounts(sub.n2, z2), d, PRIOR).pi_hat
                    assert up[k] > base[k]
        assert all(0.0 < p < 1.0 for p in base)

    def test_delegation(self, scenario1_counts):
        c = scenario1_counts
        sub = pool_subgroups(c)
        a = fit_power_prior(c, sub, PRIOR, "FIXED0")
        b = fit_fixed_delta(c, sub, DeltaPair(0, 0), PRIOR)
        assert a.pi_hat == b.pi_hat and a.delta_hat == b.delta_hat
        assert fit_power_prior(c, sub, PRIOR, (0.3, 0.6)).pi_hat == \
            fit_fixed_delta(c, sub, (0.3, 0.6), PRIOR).pi_hat

    def test_bom_on_replica_pools(self):
        c = stage1_only([30, 30, 30], [6, 9, 12])
        sub = SubgroupCounts(np.column_stack([c.n1, c.n1]), np.column_stack([c.z1, c.z1]))
        r = fit_power_prior(c, sub, PRIOR, "BOM")
        full = fit_fixed_delta(c, sub, (1.0, 1.0), PRIOR)
        np.testing.assert_allclose(r.pi_hat, full.pi_hat, atol=1e-12)

    def test_fet_scenario2_discounts_responders(self):
        # responder stage-2 rates double those of stage 1 in scenario 2
        c = simulate_trial(builtin_scenario(2), 90, RngStream(2024, 1))
        d = fit_power_prior(c, pool_subgroups(c), PRIOR, "FET").delta_hat
        assert d.d1 < d.d2

    def test_unknown_strategy(self, scenario1_counts):
        with pytest.raises(ConfigError):
            fit_power_prior(scenario1_counts, pool_subgroups(scenario1_counts), PRIOR, "NOPE")

    def test_json(self, scenario1_counts):
        r = fit_power_prior(scenario1_counts, pool_subgroups(scenario1_counts), PRIOR, "PLC")
        d = json.loads(json.dumps(r.to_dict()))
        assert set(d) == {"method", "pi_hat", "delta_hat", "linkage_hat", "summaries", "diagnostics"}
        assert d["method"] == "PLC" and d["linkage_hat"] is None
        assert set(d["pi_hat"]) == {"A", "B", "C"}


class TestMpp:
    def test_no_stage2_returns_priors(self):
        c = stage1_only([30, 30, 30], [6, 9, 12])
        prior = PriorConfig(a_delta=2.0, b_delta=3.0)
        r = mpp_fit(c, empty_subgroups(), prior, McmcConfig(seed=RngStream(3)))
        np.testing.assert_allclose(r.pi_hat, conjugate_means(c), atol=0.01)
        assert abs(r.delta_hat.d1 - 0.4) < 0.01 and abs(r.delta_hat.d2 - 0.4) < 0.01

    @pytest.mark.parametrize("d", [0.2, 0.7])
    def test_degenerate_delta_prior_matches_fixed(self, d, scenario1_counts):
        c = scenario1_counts
        sub = pool_subgroups(c)
        prior = PriorConfig(a_delta=1e6 * d, b_delta=1e6 * (1 - d))
        r = mpp_fit(c, sub, prior, McmcConfig(seed=RngStream(5)))
        f = fit_fixed_delta(c, sub, (d, d), PRIOR)
        np.testing.assert_allclose(r.pi_hat, f.pi_hat, atol=0.01)

    @pytest.mark.parametrize("i", range(2))
    def test_quadrature_oracle(self, i):
        c = simulate_trial(builtin_scenario(1 + 3 * i), 30, RngStream(500 + i))
        sub = pool_subgroups(c)
        # long chain: per-fit Monte Carlo SE of delta is about 0.002
        r = mpp_fit(c, sub, PRIOR, McmcConfig(kept_samples=100_000, seed=RngStream(42, i)))
        pi, d = mpp_quadrature(c, sub, PRIOR)
        np.testing.assert_allclose(r.pi_hat, pi, atol=0.01)
        np.testing.assert_allclose(tuple(r.delta_hat), d, atol=0.01)

    def test_deterministic(self, scenario1_counts):
        sub = pool_subgroups(scenario1_counts)
        cfg = SHORT.with_seed(RngStream(9, 2))
        a = mpp_fit(scenario1_counts, sub, PRIOR, cfg)
        b = mpp_fit(scenario1_counts, sub, PRIOR, cfg)
        assert a.to_dict() == b.to_dict()
        c = mpp_fit(scenario1_counts, sub, PRIOR, SHORT.with_seed(RngStream(9, 3)))
        assert c.pi_hat != a.pi_hat

    def test_diagnostics(self, scenario1_counts):
        r = mpp_fit(scenario1_counts, pool_subgroups(scenario1_counts), PRIOR, SHORT)
        acc = r.diagnostics["acceptance"]
        assert 0.05 <= acc["delta1"] <= 0.95 and 0.05 <= acc["delta2"] <= 0.95
        assert r.diagnostics["flags"] == []
        assert set(r.summaries) == {"pi_A", "pi_B", "pi_C", "delta1", "delta2"}
        for s in r.summaries.values():
            assert s.lower <= s.mean <= s.upper and s.sd >= 0 and s.ess > 0

    def test_acceptance_flag(self, scenario1_counts):
        # no burn-in to adapt an absurd step, so almost every proposal is rejected
        cfg = McmcConfig(burn_in=0, kept_samples=500, step_logit_delta=200.0)
        r = mpp_fit(scenario1_counts, pool_subgroups(scenario1_counts), PRIOR, cfg)
        assert "delta1_acceptance_out_of_range" in r.diagnostics["flags"]


class TestBjsm:
    def test_no_stage2(self):
        c = stage1_only([30, 30, 30], [6, 9, 12])
        r = bjsm_fit(c, PRIOR, McmcConfig(seed=RngStream(4)), sub=empty_subgroups())
        np.testing.assert_allclose(r.pi_hat, conjugate_means(c), atol=0.01)

    def test_no_stage2_linkage_is_truncated_prior(self):
        # with pi fixed at stage-1 means, beta ~ Gamma(1, 1) truncated to beta <= 1 / max(pi);
        # the mean over pi draws lies below the untruncated mean 1
        c = stage1_only([30, 30, 30], [6, 9, 12])
        r = bjsm_fit(c, PRIOR, McmcConfig(seed=RngStream(4)), sub=empty_subgroups())
        b0, b1 = r.linkage_hat
        assert abs(b0 - b1) < 0.05
        assert 0.6 < b0 < 1.0

    def test_truncation_never_violated(self):
        c = simulate_trial(builtin_scenario(2), 90, RngStream(8))
        sub = pool_subgroups(c)
        f = lambda v: np.asarray(v, dtype=np.float64)
        out, _, _ = _bjsm_chain(RngStream(1).generator(), f(c.n1), f(c.z1), f(sub.z2[:, 0]),
                                f(sub.n2[:, 0]), f(sub.z2[:, 1]), f(sub.n2[:, 1]),
                                1.0, 1.0, 1.0, 1.0, 1000, 5000, 1, 1.0, 1.0, 50)
        pi, beta = out[:, :3], out[:, 3:]
        assert np.all(beta[:, [0]] * pi <= 1.0) and np.all(beta[:, [1]] * pi <= 1.0)
        assert np.all((pi > 0) & (pi < 1)) and np.all(beta > 0)

    @pytest.mark.slow
    def test_consistency_n300(self):
        spec = builtin_scenario(1)
        pis, betas = [], []
        for r in range(100):
            c = simulate_trial(spec, 300, RngStream(31, r))
            res = bjsm_fit(c, PRIOR, McmcConfig(burn_in=1000, kept_samples=3000, seed=RngStream(32, r)))
            pis.append(res.pi_hat)
            betas.append(res.linkage_hat)
        np.testing.assert_allclose(np.mean(pis, axis=0), [0.2, 0.3, 0.4], atol=0.05)
        np.testing.assert_allclose(np.mean(betas, axis=0), [1.0, 1.0], atol=0.15)

    def test_deterministic(self, scenario1_counts):
        cfg = SHORT.with_seed(RngStream(5, 1))
        assert bjsm_fit(scenario1_counts, PRIOR, cfg).to_dict() == \
            bjsm_fit(scenario1_counts, PRIOR, cfg).to_dict()

    def test_result_shape(self, scenario1_counts):
        r = bjsm_fit(scenario1_counts, PRIOR, SHORT)
        assert r.delta_hat is None and len(r.linkage_hat) == 2
        d = r.to_dict()
        assert set(d["linkage_hat"]) == {"beta0", "beta1"}
        assert set(r.diagnostics["acceptance"]) == {"pi_A", "pi_B", "pi_C", "beta0", "beta1"}


class TestSupport:
    def test_ess_iid(self):
        x = np.random.default_rng(0).standard_normal(20_000)
        assert 0.85 * x.size < effective_sample_size(x) <= x.size * np.log10(x.size)

    def test_ess_ar1(self):
        rng = np.random.default_rng(1)
        phi, n = 0.9, 200_000
        e = rng.standard_normal(n)
        x = np.empty(n)
        x[0] = e[0]
        for t in range(1, n):
            x[t] = phi * x[t - 1] + e[t]
        expected = n * (1 - phi) / (1 + phi)
        assert effective_sample_size(x) == pytest.approx(expected, rel=0.1)

    def test_summary(self):
        s = summarize_draws(np.linspace(0, 1, 1001))
        assert isinstance(s, PosteriorSummary)
        assert s.mean == pytest.approx(0.5) and s.lower == pytest.approx(0.025)

    def test_mcmc_config(self):
        cfg = McmcConfig.from_dict({"burn_in": 10, "seed": 3, "stream_id": 4})
        assert cfg.seed == RngStream(3, 4)
        assert McmcConfig.from_dict(cfg.to_dict()) == cfg
        for bad in ({"kept_samples": 0}, {"step_log_beta": -1.0}, {"burn_in": 1.5}, {"foo": 1}):
            with pytest.raises(ConfigError):
                McmcConfig.from_dict(bad)

    def test_posterior_shapes_vectorised(self, scenario1_counts):
        sub = pool_subgroups(scenario1_counts)
        a, b = posterior_shapes(scenario1_counts, sub, (0.0, 0.0), PRIOR)
        np.testing.assert_array_equal(a, scenario1_counts.z1 + 1)
        np.testing.assert_array_equal(b, scenario1_counts.n1 - scenario1_counts.z1 + 1)
