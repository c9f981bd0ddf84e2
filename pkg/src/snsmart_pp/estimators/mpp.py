"""Modified (normalised) power prior with random power parameters.

Target: stage-1 binomial likelihood times the normalised power prior on
``(pi, delta)``.  Given ``delta`` each response rate has a conjugate beta
full conditional (the normaliser depends on ``delta`` only), so the sampler
alternates exact beta draws for ``pi`` with random-walk Metropolis updates of
``logit(delta_j)``, one subgroup at a time.  The log full conditional of
``delta`` is

    sum_k [S_k log pi_k + F_k log(1 - pi_k) - log B(S_k + a_pi, F_k + b_pi)]
    + (a_delta - 1) log delta_j + (b_delta - 1) log(1 - delta_j)

with ``S_k = sum_j delta_j z2[k, j]`` and ``F_k = sum_j delta_j (n2 - z2)[k, j]``.
"""

import math

import numba
import numpy as np

from ..numerics.special import _log_beta
from ..weights import DeltaPair
from .results import EstimateResult, summarize_draws

__all__ = ["mpp_fit"]

_TINY = 1e-300
_ONE_MINUS = 1.0 - 1e-16


@numba.njit(cache=True, nogil=True)
def _delta_log_conditional(d, z2, f2, log_pi, log_1mpi, a_pi, b_pi, a_d, b_d, j):
    total = 0.0
    for k in range(3):
        s = d[0] * z2[k, 0] + d[1] * z2[k, 1]
        f = d[0] * f2[k, 0] + d[1] * f2[k, 1]
        total += s * log_pi[k] + f * log_1mpi[k] - _log_beta(s + a_pi, f + b_pi)
    # prior plus the logit Jacobian delta (1 - delta)
    return total + a_d * math.log(d[j]) + b_d * math.log1p(-d[j])


@numba.njit(cache=True, nogil=True)
def _mpp_chain(rng, n1, z1, n2, z2, a_pi, b_pi, a_d, b_d,
               burn_in, kept, thin, step0, adapt_every):
    f1 = n1 - z1
    f2 = n2 - z2
    d = np.empty(2)
    d[:] = a_d / (a_d + b_d)
    pi = np.empty(3)
    log_pi = np.empty(3)
    log_1mpi = np.empty(3)
    step = np.empty(2)
    step[:] = step0
    win_acc = np.zeros(2)
    acc = np.zeros(2)
    out_pi = np.empty((kept, 3))
    out_d = np.empty((kept, 2))
    prop = np.empty(2)
    n_iter = burn_in + kept * thin
    for it in range(n_iter):
        for k in range(3):
            a = z1[k] + d[0] * z2[k, 0] + d[1] * z2[k, 1] + a_pi
            b = f1[k] + d[0] * f2[k, 0] + d[1] * f2[k, 1] + b_pi
            p = rng.beta(a, b)
            p = min(max(p, _TINY), _ONE_MINUS)
            pi[k] = p
            log_pi[k] = math.log(p)
            log_1mpi[k] = math.log1p(-p)
        for j in range(2):
            x = math.log(d[j]) - math.log1p(-d[j])
            y = x + step[j] * rng.standard_normal()
            dj = 1.0 / (1.0 + math.exp(-y))
            accepted = False
            if 0.0 < dj < 1.0:
                prop[0] = d[0]
                prop[1] = d[1]
                prop[j] = dj
                lp_new = _delta_log_conditional(prop, z2, f2, log_pi, log_1mpi, a_pi, b_pi, a_d, b_d, j)
                lp_old = _delta_log_conditional(d, z2, f2, log_pi, log_1mpi, a_pi, b_pi, a_d, b_d, j)
                if math.log(rng.random()) < lp_new - lp_old:
                    d[j] = dj
                    accepted = True
            if accepted:
                if it < burn_in:
                    win_acc[j] += 1
                else:
                    acc[j] += 1
        if it < burn_in and (it + 1) % adapt_every == 0:
            for j in range(2):
                rate = win_acc[j] / adapt_every
                if rate < 0.2:
                    step[j] *= 0.5
                elif rate > 0.5:
                    step[j] *= 2.0
                win_acc[j] = 0.0
        if it >= burn_in and (it - burn_in + 1) % thin == 0:
            i = (it - burn_in) // thin
            out_pi[i, :] = pi
            out_d[i, :] = d
    n_post = kept * thin
    return out_pi, out_d, acc / n_post, step


def mpp_fit(stage1, sub, prior, mcmc):
    """Posterior means of ``pi`` and ``delta`` under the modified power prior."""
    g = mcmc.seed.generator()
    out_pi, out_d, acc, step = _mpp_chain(
        g,
        stage1.n1.astype(np.float64), stage1.z1.astype(np.float64),
        sub.n2.astype(np.float64), sub.z2.astype(np.float64),
        prior.a_pi, prior.b_pi, prior.a_delta, prior.b_delta,
        mcmc.burn_in, mcmc.kept_samples, mcmc.thin, mcmc.step_logit_delta, mcmc.adapt_every)
    summaries = {f"pi_{t}": summarize_draws(out_pi[:, i]) for i, t in enumerate("ABC")}
    summaries["delta1"] = summarize_draws(out_d[:, 0])
    summaries["delta2"] = summarize_draws(out_d[:, 1])
    flags = [f"delta{j + 1}_acceptance_out_of_range" for j in range(2) if not 0.05 <= acc[j] <= 0.95]
    pi_hat = out_pi.mean(axis=0)
    d_hat = out_d.mean(axis=0)
    return EstimateResult(
        method="MPP",
        pi_hat=tuple(pi_hat),
        delta_hat=DeltaPair(d_hat[0], d_hat[1], flags=tuple(flags)),
        summaries=summaries,
        diagnostics={"acceptance": {"delta1": float(acc[0]), "delta2": float(acc[1])},
                     "final_step": {"delta1": float(step[0]), "delta2": float(step[1])},
                     "flags": flags},
    )
