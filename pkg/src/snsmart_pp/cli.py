"""Command line interface.

    snsmart-pp analyze  --data trial.csv --method FET
    snsmart-pp simulate --scenario 1 --n 90 --seed 7 --out trial.csv
    snsmart-pp study    --config study.json --out results/ --threads 4

Exit codes: 0 success, 1 usage error, 2 data or consistency error, 3 runtime
failure.  Diagnostics go to stderr.
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import replace

from .errors import DataError, SnsmartError
from .estimators import McmcConfig, fit_fixed_delta
from .numerics.rng import RngStream
from .reports import write_reports
from .simulator import load_scenario, simulate_participants
from .study import METHODS, StudyConfig, fit_method, run_study
from .trial_data import aggregate_counts, pool_subgroups, read_participants, write_participants
from .weights import DeltaPair, PriorConfig

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3
OUT_DIR_ENV = "SNSMART_PP_OUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _key_values(items, what):
    out = {}
    for item in items or ():
        for part in item.split(","):
            if not part.strip():
                continue
            key, sep, value = part.partition("=")
            if not sep:
                raise UsageError(f"--{what} expects key=value, got {part!r}")
            try:
                out[key.strip()] = json.loads(value)
            except json.JSONDecodeError:
                raise UsageError(f"--{what} {key}: cannot parse value {value!r}") from None
    return out


def _build_parser():
    p = _Parser(prog="snsmart-pp", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    a = sub.add_parser("analyze", help="estimate response rates from a participant CSV")
    a.add_argument("--data", required=True, help="participant CSV")
    a.add_argument("--method", required=True, type=str.upper, choices=METHODS + ("FIXED",))
    a.add_argument("--delta", help="d1,d2 for --method FIXED")
    a.add_argument("--prior", action="append", metavar="KEY=VALUE",
                   help="prior hyperparameters, e.g. a_pi=1,b_pi=1,a_delta=0.4")
    a.add_argument("--mcmc", action="append", metavar="KEY=VALUE",
                   help="sampler settings, e.g. burn_in=2000,kept_samples=10000,seed=1")

    s = sub.add_parser("simulate", help="simulate one trial as participant CSV")
    s.add_argument("--scenario", required=True, help="builtin id 1-7 or scenario JSON file")
    s.add_argument("--n", required=True, type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--stream", type=int, default=0)
    s.add_argument("--out", help="output CSV (default: stdout)")

    st = sub.add_parser("study", help="run a Monte Carlo study from a JSON config")
    st.add_argument("--config", required=True)
    st.add_argument("--out", help=f"output directory (default: ${OUT_DIR_ENV} or ./study_out)")
    st.add_argument("--threads", type=int, help="worker threads (overrides config parallelism)")
    return p


def _analyze(args):
    records = read_participants(args.data)
    counts = aggregate_counts(records)
    prior = PriorConfig.from_dict(_key_values(args.prior, "prior"))
    mcmc = McmcConfig.from_dict(_key_values(args.mcmc, "mcmc"))
    if args.method == "FIXED":
        if not args.delta:
            raise UsageError("--method FIXED requires --delta d1,d2")
        try:
            d = DeltaPair(*(float(v) for v in args.delta.split(",")))
        except (TypeError, ValueError) as exc:
            raise UsageError(f"--delta: {exc}") from None
        result = fit_fixed_delta(counts, pool_subgroups(counts), d, prior)
    else:
        if args.delta:
            raise UsageError("--delta is only valid with --method FIXED")
        result = fit_method(args.method, counts, prior, mcmc)
    out = result.to_dict()
    out["counts"] = counts.to_dict()
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _simulate(args):
    spec = load_scenario(args.scenario)
    try:
        stream = RngStream(args.seed, args.stream)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    records = simulate_participants(spec, args.n, stream)
    if args.out:
        write_participants(records, args.out)
    else:
        sys.stdout.write(write_participants(records))


def _study(args):
    config = StudyConfig.load(args.config)
    if args.threads is not None:
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        config = replace(config, parallelism=args.threads)
    out_dir = args.out or os.environ.get(OUT_DIR_ENV) or "study_out"
    report = run_study(config)
    paths = write_reports(report, out_dir)
    for name, path in paths.items():
        print(f"{name}: {path}", file=sys.stderr)


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args = _build_parser().parse_args(argv)
        if args.verbose:
            logging.getLogger().setLevel(logging.INFO)
        if args.command is None:
            raise UsageError("a subcommand is required: analyze, simulate or study")
        {"analyze": _analyze, "simulate": _simulate, "study": _study}[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (SnsmartError, OSError, RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
