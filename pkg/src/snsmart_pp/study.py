"""Monte Carlo operating-characteristic studies.

Replication ``r`` draws everything from ``RngStream(master_seed, r)``: the
trial from substream 0 and each method's sampler from substream
``1 + METHODS.index(method)``.  All (scenario, N) cells and all methods in a
replication therefore see common random numbers, and results do not depend
on how replications are spread over worker threads.
"""

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import jsonschema
import numpy as np

from .errors import ConfigError, StudyError
from .estimators import McmcConfig, bjsm_fit, fit_power_prior, mpp_fit
from .numerics.rng import RngStream
from .simulator import ScenarioSpec, builtin_scenario, simulate_trial
from .trial_data import pool_subgroups
from .weights import PriorConfig

__all__ = [
    "METHODS",
    "POWER_PRIOR_METHODS",
    "StudyConfig",
    "CellSummary",
    "StudyReport",
    "fit_method",
    "run_study",
    "MAX_EXCLUDED_FRACTION",
]

log = logging.getLogger(__name__)

METHODS = ("FIXED0", "FIXED1", "PLC", "MLC", "MPP", "BOM", "FET", "BJSM")
POWER_PRIOR_METHODS = METHODS[:-1]
SCHEMA_VERSION = 1
MAX_EXCLUDED_FRACTION = 0.01


def _schema():
    text = resources.files("snsmart_pp").joinpath("schemas/study_config.schema.json").read_text()
    return json.loads(text)


@dataclass(frozen=True)
class StudyConfig:
    scenarios: tuple
    n_totals: tuple
    replications: int
    methods: tuple
    prior: PriorConfig = field(default_factory=PriorConfig)
    mcmc: McmcConfig = field(default_factory=McmcConfig)
    master_seed: int = 0
    parallelism: int = 1
    write_delta_draws: bool = True

    def __post_init__(self):
        scenarios = tuple(s if isinstance(s, ScenarioSpec) else builtin_scenario(s)
                          for s in self.scenarios)
        if not scenarios:
            raise ConfigError("at least one scenario is required")
        names = [s.name for s in scenarios]
        if len(set(names)) != len(names):
            raise ConfigError(f"scenario names must be unique, got {names}")
        n_totals = tuple(int(n) for n in self.n_totals)
        if not n_totals or any(n <= 0 or n % 3 for n in n_totals):
            raise ConfigError(f"n_totals must be positive multiples of 3, got {self.n_totals!r}")
        methods = tuple(m.upper() for m in self.methods)
        if not methods:
            raise ConfigError("at least one method is required")
        bad = [m for m in methods if m not in METHODS]
        if bad:
            raise ConfigError(f"unknown methods {bad}; choose from {METHODS}")
        if len(set(methods)) != len(methods):
            raise ConfigError("methods must be unique")
        if int(self.replications) != self.replications or self.replications < 1:
            raise ConfigError("replications must be a positive integer")
        if int(self.parallelism) != self.parallelism or self.parallelism < 1:
            raise ConfigError("parallelism must be a positive integer")
        RngStream(self.master_seed)  # range check
        object.__setattr__(self, "scenarios", scenarios)
        object.__setattr__(self, "n_totals", n_totals)
        object.__setattr__(self, "methods", methods)
        object.__setattr__(self, "replications", int(self.replications))
        object.__setattr__(self, "parallelism", int(self.parallelism))
        object.__setattr__(self, "master_seed", int(self.master_seed))

    def to_dict(self):
        mcmc = self.mcmc.to_dict()
        mcmc.pop("seed")
        mcmc.pop("stream_id")
        return {
            "schema_version": SCHEMA_VERSION,
            "scenarios": [s.to_dict() for s in self.scenarios],
            "n_totals": list(self.n_totals),
            "replications": self.replications,
            "methods": list(self.methods),
            "prior": self.prior.to_dict(),
            "mcmc": mcmc,
            "master_seed": self.master_seed,
            "parallelism": self.parallelism,
            "write_delta_draws": self.write_delta_draws,
        }

    @classmethod
    def from_dict(cls, d):
        try:
            jsonschema.validate(d, _schema())
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"invalid study config at {where}: {exc.message}") from None
        scenarios = [s if isinstance(s, int) else ScenarioSpec.from_dict(
            {"name": f"custom{i + 1}", **s}) for i, s in enumerate(d["scenarios"])]
        return cls(
            scenarios=scenarios,
            n_totals=d["n_totals"],
            replications=d["replications"],
            methods=d["methods"],
            prior=PriorConfig.from_dict(d.get("prior", {})),
            mcmc=McmcConfig.from_dict(d.get("mcmc", {})),
            master_seed=d.get("master_seed", 0),
            parallelism=d.get("parallelism", 1),
            write_delta_draws=d.get("write_delta_draws", True),
        )

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                d = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read study config {path!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"study config {path!r} is not valid JSON: {exc}") from exc
        return cls.from_dict(d)


@dataclass(frozen=True)
class CellSummary:
    """Accuracy of one method in one (scenario, N) cell over the kept replications."""

    scenario: str
    n_total: int
    method: str
    bias: tuple
    rmse: tuple
    mean_abs_bias: float
    mean_rmse: float
    delta_mean: tuple | None
    delta_sd: tuple | None
    n_used: int
    n_excluded: int


@dataclass
class StudyReport:
    config: StudyConfig
    cells: list
    delta_draws: dict = field(default_factory=dict)   # (scenario, N, method) -> (reps, deltas)
    excluded: dict = field(default_factory=dict)      # (scenario, N) -> [(rep, message)]
    wall_time: float = 0.0

    def cell(self, scenario, n_total, method):
        scenario = str(scenario)
        for c in self.cells:
            if c.scenario == scenario and c.n_total == n_total and c.method == method.upper():
                return c
        raise KeyError((scenario, n_total, method))


def fit_method(method, counts, prior, mcmc, stream=None):
    """Fit one named method to a trial; ``stream`` seeds the MCMC methods."""
    method = method.upper()
    if stream is not None:
        mcmc = mcmc.with_seed(stream)
    if method == "BJSM":
        return bjsm_fit(counts, prior, mcmc)
    sub = pool_subgroups(counts)
    if method == "MPP":
        return mpp_fit(counts, sub, prior, mcmc)
    if method in POWER_PRIOR_METHODS:
        return fit_power_prior(counts, sub, prior, method)
    raise ConfigError(f"unknown method {method!r}")


def _run_replication(config, r):
    rep = RngStream(config.master_seed, r)
    out = []
    for spec in config.scenarios:
        for n in config.n_totals:
            try:
                counts = simulate_trial(spec, n, rep.child(0))
                fits = {}
                for m in config.methods:
                    res = fit_method(m, counts, config.prior, config.mcmc,
                                     rep.child(1 + METHODS.index(m)))
                    fits[m] = (res.pi_hat, None if res.delta_hat is None else tuple(res.delta_hat))
                out.append(fits)
            except Exception as exc:  # recorded, replication excluded from this cell
                log.warning("replication %d, scenario %s, N=%d failed: %s", r, spec.name, n, exc)
                out.append(f"{type(exc).__name__}: {exc}")
    return out


def run_study(config):
    t0 = time.perf_counter()
    reps = range(config.replications)
    if config.parallelism == 1:
        results = [_run_replication(config, r) for r in reps]
    else:
        with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
            results = list(pool.map(lambda r: _run_replication(config, r), reps))

    cells = []
    draws = {}
    excluded = {}
    idx = 0
    for spec in config.scenarios:
        truth = np.asarray(spec.stage1_rates)
        for n in config.n_totals:
            per_rep = [res[idx] for res in results]
            idx += 1
            bad = [(r, v) for r, v in enumerate(per_rep) if isinstance(v, str)]
            excluded[(spec.name, n)] = bad
            if len(bad) > MAX_EXCLUDED_FRACTION * config.replications:
                raise StudyError(f"scenario {spec.name}, N={n}: {len(bad)} of "
                                 f"{config.replications} replications failed; first: {bad[0][1]}")
            good = [r for r, v in enumerate(per_rep) if not isinstance(v, str)]
            if not good:
                raise StudyError(f"scenario {spec.name}, N={n}: no replication succeeded")
            for m in config.methods:
                est = np.array([per_rep[r][m][0] for r in good])
                err = est - truth
                bias = err.mean(axis=0)
                rmse = np.sqrt((err ** 2).mean(axis=0))
                d_mean = d_sd = None
                if per_rep[good[0]][m][1] is not None:
                    d = np.array([per_rep[r][m][1] for r in good])
                    d_mean = tuple(float(v) for v in d.mean(axis=0))
                    d_sd = tuple(float(v) for v in d.std(axis=0, ddof=1)) if len(good) > 1 else (0.0, 0.0)
                    draws[(spec.name, n, m)] = (np.array(good), d)
                cells.append(CellSummary(
                    scenario=spec.name, n_total=n, method=m,
                    bias=tuple(float(v) for v in bias), rmse=tuple(float(v) for v in rmse),
                    mean_abs_bias=float(np.abs(bias).mean()), mean_rmse=float(rmse.mean()),
                    delta_mean=d_mean, delta_sd=d_sd,
                    n_used=len(good), n_excluded=len(bad)))
    return StudyReport(config, cells, draws, excluded, time.perf_counter() - t0)
