"""Power prior estimation of first-stage response rates in small-n SMARTs."""

from .errors import (ConfigError, ConsistencyError, DataError, DomainError, OptimizationError,
                     ParseError, QuadratureError, SnsmartError, StudyError)
from .estimators import (EstimateResult, McmcConfig, PosteriorSummary, bjsm_fit,
                         fit_fixed_delta, fit_power_prior, mpp_fit)
from .numerics import BetaParams, RngStream
from .simulator import ScenarioSpec, builtin_scenario, simulate_participants, simulate_trial
from .study import METHODS, StudyConfig, StudyReport, fit_method, run_study
from .trial_data import (ParticipantRecord, SubgroupCounts, Treatment, TrialCounts,
                         aggregate_counts, parse_participants, pool_subgroups,
                         read_participants, write_participants)
from .weights import (DeltaPair, PriorConfig, bom_overlap, delta_bom, delta_fet, delta_mlc,
                      delta_plc, fisher_exact_two_sided)

__version__ = "0.1.0"
