"""Bayesian joint stage model.

Stage-2 response rates are tied to stage-1 rates through two linkage
parameters: ``beta1 * pi_k`` for stage-1 responders who stay on k, and
``beta0 * pi_k`` for non-responders who move to k (from either other arm).
Priors: ``pi_k ~ Beta(a_pi, b_pi)``, ``beta0, beta1 ~ Gamma(shape, rate)``,
truncated to ``beta * pi_k <= 1`` for every k.

Sampling is one-at-a-time random-walk Metropolis: ``logit(pi_k)`` and
``log(beta)``, with the Jacobians of both transforms in the target.
Proposals leaving the truncated support are rejected.
"""

import math

import numba
import numpy as np

from ..trial_data import pool_subgroups
from .results import EstimateResult, summarize_draws

__all__ = ["bjsm_fit"]


@numba.njit(cache=True, nogil=True)
def _xlogy(x, y):
    if x == 0.0:
        return 0.0
    if y <= 0.0:
        return -math.inf
    return x * math.log(y)


@numba.njit(cache=True, nogil=True)
def _binom_ll(succ, fail, p):
    return _xlogy(succ, p) + _xlogy(fail, 1.0 - p)


@numba.njit(cache=True, nogil=True)
def _pi_log_conditional(p, k, beta0, beta1, z1, f1, yr, fr, yn, fn, a_pi, b_pi):
    if not (0.0 < p < 1.0) or beta0 * p > 1.0 or beta1 * p > 1.0:
        return -math.inf
    return (_binom_ll(z1[k], f1[k], p) + _binom_ll(yr[k], fr[k], beta1 * p)
            + _binom_ll(yn[k], fn[k], beta0 * p)
            + a_pi * math.log(p) + b_pi * math.log1p(-p))  # prior + logit Jacobian


@numba.njit(cache=True, nogil=True)
def _beta_log_conditional(beta, pi, succ, fail, shape, rate):
    if beta <= 0.0:
        return -math.inf
    total = shape * math.log(beta) - rate * beta  # prior + log Jacobian
    for k in range(3):
        if beta * pi[k] > 1.0:
            return -math.inf
        total += _binom_ll(succ[k], fail[k], beta * pi[k])
    return total


@numba.njit(cache=True, nogil=True)
def _bjsm_chain(rng, n1, z1, yr, n_resp2, yn, n_non2, a_pi, b_pi, shape, rate,
                burn_in, kept, thin, step_pi0, step_beta0, adapt_every):
    f1 = n1 - z1
    fr = n_resp2 - yr
    fn = n_non2 - yn
    pi = (z1 + a_pi) / (n1 + a_pi + b_pi)
    beta = np.ones(2)  # [beta0, beta1]
    step = np.empty(5)
    step[:3] = step_pi0
    step[3:] = step_beta0
    win_acc = np.zeros(5)
    acc = np.zeros(5)
    out = np.empty((kept, 5))
    n_iter = burn_in + kept * thin
    for it in range(n_iter):
        for k in range(3):
            old = pi[k]
            x = math.log(old) - math.log1p(-old)
            new = 1.0 / (1.0 + math.exp(-(x + step[k] * rng.standard_normal())))
            lp_new = _pi_log_conditional(new, k, beta[0], beta[1], z1, f1, yr, fr, yn, fn, a_pi, b_pi)
            if lp_new > -math.inf:
                lp_old = _pi_log_conditional(old, k, beta[0], beta[1], z1, f1, yr, fr, yn, fn, a_pi, b_pi)
                if math.log(rng.random()) < lp_new - lp_old:
                    pi[k] = new
                    if it < burn_in:
                        win_acc[k] += 1
                    else:
                        acc[k] += 1
        for m in range(2):
            # m = 0: non-responders (beta0); m = 1: responders (beta1)
            if m == 0:
                succ, fail = yn, fn
            else:
                succ, fail = yr, fr
            old = beta[m]
            new = old * math.exp(step[3 + m] * rng.standard_normal())
            lp_new = _beta_log_conditional(new, pi, succ, fail, shape, rate)
            if lp_new > -math.inf:
                lp_old = _beta_log_conditional(old, pi, succ, fail, shape, rate)
                if math.log(rng.random()) < lp_new - lp_old:
                    beta[m] = new
                    if it < burn_in:
                        win_acc[3 + m] += 1
                    else:
                        acc[3 + m] += 1
        if it < burn_in and (it + 1) % adapt_every == 0:
            for i in range(5):
                r = win_acc[i] / adapt_every
                if r < 0.2:
                    step[i] *= 0.5
                elif r > 0.5:
                    step[i] *= 2.0
                win_acc[i] = 0.0
        if it >= burn_in and (it - burn_in + 1) % thin == 0:
            i = (it - burn_in) // thin
            out[i, :3] = pi
            out[i, 3:] = beta
    return out, acc / (kept * thin), step


_NAMES = ("pi_A", "pi_B", "pi_C", "beta0", "beta1")


def bjsm_fit(counts, prior, mcmc, sub=None):
    """Posterior means of the response rates and both linkage parameters.

    With a common non-responder linkage the likelihood depends on stage 2
    only through the pooled subgroup counts, which are taken from ``sub``
    when given (e.g. an all-zero ``SubgroupCounts`` for stage-1-only data)
    and pooled from ``counts`` otherwise.
    """
    if sub is None:
        sub = pool_subgroups(counts)
    g = mcmc.seed.generator()
    f = lambda v: np.asarray(v, dtype=np.float64)
    out, acc, step = _bjsm_chain(
        g, f(counts.n1), f(counts.z1), f(sub.z2[:, 0]), f(sub.n2[:, 0]),
        f(sub.z2[:, 1]), f(sub.n2[:, 1]),
        prior.a_pi, prior.b_pi, prior.beta_shape, prior.beta_rate,
        mcmc.burn_in, mcmc.kept_samples, mcmc.thin,
        mcmc.step_logit_pi, mcmc.step_log_beta, mcmc.adapt_every)
    means = out.mean(axis=0)
    flags = [f"{n}_acceptance_out_of_range" for n, a in zip(_NAMES, acc) if not 0.05 <= a <= 0.95]
    return EstimateResult(
        method="BJSM",
        pi_hat=tuple(means[:3]),
        linkage_hat=(means[3], means[4]),
        summaries={n: summarize_draws(out[:, i]) for i, n in enumerate(_NAMES)},
        diagnostics={"acceptance": {n: float(a) for n, a in zip(_NAMES, acc)},
                     "final_step": {n: float(s) for n, s in zip(_NAMES, step)},
                     "flags": flags},
    )
