#! /usr/bin/env python
import argparse
import logging

from frictionfolio.exceptions.common.exceptions import FrictionfolioError
from frictionfolio.ui.common import run_experiment, setup_logging
from frictionfolio.ui.information import frictionfolio_about


logger = logging.getLogger(__name__)


def _add_run_arguments(subparser):
    subparser.add_argument("config", nargs="?", help="experiment YAML file, merged over the bundled preset")
    subparser.add_argument("--output", help="output root (default: $FRICTIONFOLIO_OUTPUT_ROOT or ./frictionfolio-runs)")
    subparser.add_argument("--seed", type=int, help="master random seed")
    subparser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                           help="override a config value, e.g. --set model.beta=0.5")


def main(argv=None):
    parser = argparse.ArgumentParser()
    parser.add_argument("--verbose", help="increase output verbosity", action="store_true")
    parser.add_argument("--quiet", help="silence all output", action="store_true")
    subparsers = parser.add_subparsers(dest="action")
    subparsers.required = True

    calibrate_parser = subparsers.add_parser("calibrate", help="calibrate utility families to option chains")
    _add_run_arguments(calibrate_parser)
    calibrate_parser.add_argument("--input", help="directory of chain CSV files and an optional realizations.csv")
    calibrate_parser.add_argument("--horizons", help="comma-separated horizon buckets to calibrate, e.g. 1w,4w")
    calibrate_parser.set_defaults(func=_calibrate)

    solve_parser = subparsers.add_parser("solve", help="solve the portfolio problem by policy iteration")
    _add_run_arguments(solve_parser)
    solve_parser.set_defaults(func=_run)

    validate_parser = subparsers.add_parser("validate-merton",
                                            help="check the solver against the Merton closed form")
    _add_run_arguments(validate_parser)
    validate_parser.set_defaults(func=_run)

    sweep_parser = subparsers.add_parser("sweep", help="solve across values of one parameter and slice the policy")
    _add_run_arguments(sweep_parser)
    sweep_parser.add_argument("--jobs", type=int, default=1, help="solve sweep values in this many processes")
    sweep_parser.set_defaults(func=_run)

    version_parser = subparsers.add_parser("version", help="display version information")
    version_parser.set_defaults(func=_version)

    args = parser.parse_args(argv)

    setup_logging(quiet=args.quiet, verbose=args.verbose)

    try:
        return args.func(args)
    except FrictionfolioError as e:
        logger.error(str(e))
        return 1


def _run(args):
    exit_code, _ = run_experiment(command=args.action,
                                  config_path=args.config,
                                  overrides=args.overrides,
                                  seed=args.seed,
                                  output_root=args.output,
                                  jobs=getattr(args, "jobs", 1))
    return exit_code


def _calibrate(args):
    if args.input is not None:
        # single-quoted so the path stays a YAML string
        args.overrides = ["input='{}'".format(args.input.replace("'", "''"))] + args.overrides
    if args.horizons is not None:
        args.overrides = ["horizons=[{}]".format(args.horizons)] + args.overrides
    return _run(args)


def _version(args):
    print(frictionfolio_about())
    return 0
