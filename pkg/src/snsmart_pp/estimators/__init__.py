from .bjsm import bjsm_fit
from .conjugate import beta_summary, fit_fixed_delta, fit_power_prior, posterior_shapes
from .mpp import mpp_fit
from .results import (EstimateResult, McmcConfig, PosteriorSummary, effective_sample_size,
                      summarize_draws)

__all__ = [
    "EstimateResult", "McmcConfig", "PosteriorSummary", "effective_sample_size",
    "summarize_draws", "posterior_shapes", "beta_summary", "fit_fixed_delta",
    "fit_power_prior", "mpp_fit", "bjsm_fit",
]
