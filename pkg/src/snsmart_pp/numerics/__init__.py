from .optimize import grid_minimize_2d, lattice_minimize
from .quadrature import quad_01
from .rng import (RngStream, as_generator, sample_bernoulli, sample_beta,
                  sample_gamma, sample_uniform_choice)
from .special import BetaParams, log_beta, log_hypergeom_pmf, hypergeom_pmf_exact

__all__ = [
    "BetaParams", "RngStream", "as_generator", "sample_beta", "sample_gamma", "sample_bernoulli",
    "sample_uniform_choice", "log_beta", "log_hypergeom_pmf", "hypergeom_pmf_exact",
    "grid_minimize_2d", "lattice_minimize", "quad_01",
]
