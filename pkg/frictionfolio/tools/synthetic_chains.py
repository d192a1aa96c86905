#! /usr/bin/env python

import argparse
import logging
import os
import sys

from frictionfolio.exceptions.common.exceptions import FrictionfolioError, FileAccessError
from frictionfolio.model.calibration.synthetic import SyntheticChainConfig, generate_chains
from frictionfolio.model.experiments.config import config_hash, parse_overrides
from frictionfolio.ui.common import setup_logging
from frictionfolio.util.common.tables import write_table
from frictionfolio.util.common.yml import yml_load_file, merge_yml_reps


log = logging.getLogger(__name__)


def write_synthetic_chains(output_directory, rep):
    """Generates chains from the ``rep`` mapping and writes ``chains.csv`` and ``realizations.csv``."""
    config = SyntheticChainConfig.from_yml_rep(rep)
    chains, realizations = generate_chains(config)
    try:
        os.makedirs(output_directory, exist_ok=True)
    except OSError as e:
        raise FileAccessError("Could not create directory {}: {}".format(output_directory, e))
    rep_hash = config_hash(rep)
    for name, frame in [("chains", chains), ("realizations", realizations)]:
        with open(os.path.join(output_directory, name + ".csv"), "w", encoding="utf-8", newline="\n") as f:
            write_table(frame.assign(**dict((c, frame[c].dt.strftime("%Y-%m-%d"))
                                            for c in frame.columns if c in ["as_of", "expiry", "date"])),
                        f, rep_hash, config.seed)
    log.info("Wrote {} quotes and {} realizations to {}".format(len(chains), len(realizations), output_directory))
    return chains, realizations


def main(argv=None):
    parser = argparse.ArgumentParser(description="Write synthetic option chains in the calibrate input format")
    parser.add_argument("output", metavar="OUTPUT", help="output directory")
    parser.add_argument("--config", help="YAML file with generator settings")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    parser.add_argument("--verbose", help="increase output verbosity", action="store_true")
    parser.add_argument("--quiet", help="silence all output", action="store_true")
    args = parser.parse_args(argv)

    setup_logging(quiet=args.quiet, verbose=args.verbose)
    try:
        rep = yml_load_file(args.config) or {} if args.config else {}
        rep = merge_yml_reps(rep, parse_overrides(args.overrides))
        if args.seed is not None:
            rep["seed"] = args.seed
        write_synthetic_chains(args.output, rep)
    except FrictionfolioError as e:
        log.error(str(e))
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
