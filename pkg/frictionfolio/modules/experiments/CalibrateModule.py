import glob
import logging
import os

import pandas as pd

from frictionfolio.exceptions.common.exceptions import FrictionfolioError, FileAccessError, MissingUserDataError
from frictionfolio.exceptions.model.exceptions import NoChainsError
from frictionfolio.model.calibration.calibrate import prepare_pairs, calibrate_utility
from frictionfolio.model.calibration.chains import ingest_chains, read_chain_csv, read_realizations_csv, \
    realization_lookup
from frictionfolio.model.calibration.density import subjective_density
from frictionfolio.modules.common.GenericModule import GenericModule
from frictionfolio.util.common.helper import get_from_user_dict
from frictionfolio.util.common.tables import write_table


log = logging.getLogger(__name__)

REALIZATIONS_FILENAME = "realizations.csv"
TABLE_COLUMNS = ["p3", "p1", "adjusted_p3", "adjusted_p1"]


def read_input_directory(path):
    """Returns ``(chains frame, realizations frame or None)`` from a directory of chain CSV files, with realized
    prices in an optional ``realizations.csv``."""
    if not os.path.isdir(path):
        raise FileAccessError("Input directory {} does not exist".format(path))
    chain_files = sorted(f for f in glob.glob(os.path.join(path, "*.csv"))
                         if os.path.basename(f) != REALIZATIONS_FILENAME)
    frames = [read_chain_csv(f) for f in chain_files]
    frames = [frame for frame in frames if not frame.empty]
    if not frames:
        raise NoChainsError("No option chains found in {}".format(path))
    realizations_path = os.path.join(path, REALIZATIONS_FILENAME)
    realizations = read_realizations_csv(realizations_path) if os.path.isfile(realizations_path) else None
    return pd.concat(frames, ignore_index=True), realizations


def pvalue_table(results):
    """Families down, horizons across, one column per horizon and p-value kind."""
    ok = results[results["status"] == "ok"] if not results.empty else results
    if ok.empty:
        return pd.DataFrame()
    table = ok.pivot(index="family", columns="horizon", values=TABLE_COLUMNS)
    table.columns = ["{}_{}".format(horizon, kind) for kind, horizon in table.columns]
    table = table[sorted(table.columns)]
    families = list(dict.fromkeys(results["family"]))
    return table.reindex(families).reset_index()


def density_frame(pairs, utility):
    """Risk-neutral ``q`` and subjective ``p`` densities of every pair on its price grid ``s``."""
    frames = []
    for pair in pairs:
        p = subjective_density(pair.density, utility)
        frames.append(pd.DataFrame({"chain": pair.name, "s": pair.density.grid, "q": pair.density.density,
                                    "p": p.density}))
    return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()


class CalibrateModule(GenericModule):
    NAME = "Utility Calibration"
    COMMAND = "calibrate"

    def __init__(self):
        super(CalibrateModule, self).__init__()
        self.results = pd.DataFrame()
        self.filter_counts = pd.DataFrame()
        # (horizon, family) -> frame of chain, s, q, p
        self.densities = {}

    def run(self, config, jobs=1):
        try:
            path = get_from_user_dict(config.rep, "input", str)
        except MissingUserDataError:
            raise NoChainsError("No input directory given")
        calibration = config.calibration_config()
        families = config.calibration_families()
        keep_densities = get_from_user_dict(config.rep, "write_densities", bool, True)

        chains_frame, realizations_frame = read_input_directory(path)
        ingest = ingest_chains(chains_frame, calibration.filters)
        if not ingest.chains:
            raise NoChainsError("None of the {} chain(s) in {} survived filtering".format(len(ingest.rejected), path))
        realizations = realization_lookup(chains_frame, realizations_frame)
        self.filter_counts = self._filter_counts(ingest)

        rows = []
        buckets = ingest.by_horizon()
        for label in config.calibration_horizons():
            pairs = prepare_pairs(buckets.get(label, []), realizations, calibration)
            if len(pairs) < calibration.min_chains:
                self.note("Skipping horizon {}: {} usable chain(s), need {}".format(label, len(pairs),
                                                                                  calibration.min_chains))
                continue
            log.info("Calibrating horizon {} over {} chains".format(label, len(pairs)))
            for family in families:
                row, result = self._calibrate_row(family, label, pairs, calibration, config.seed)
                rows.append(row)
                if result is not None and keep_densities:
                    self.densities[(label, family.VARIANT)] = density_frame(pairs, result.utility)

        self.results = pd.DataFrame(rows)
        if self.results.empty:
            self.fail("No horizon bucket had enough chains to calibrate")

    def _calibrate_row(self, family, label, pairs, calibration, seed):
        try:
            result = calibrate_utility(family, pairs, calibration.optimizer, calibration.n_mc, seed)
        except FrictionfolioError as e:
            self.note("Calibration of {} at horizon {} failed: {}".format(family.VARIANT, label, e))
            return {"family": family.VARIANT, "horizon": label, "status": "failed"}, None
        if not result.converged:
            self.note("Optimizer did not converge for {} at horizon {}".format(family.VARIANT, label))
        row = {"family": family.VARIANT, "horizon": label, "status": "ok"}
        row.update(result.to_row())
        return row, result

    @staticmethod
    def _filter_counts(ingest):
        rows = []
        for chain in ingest.chains:
            row = {"chain": chain.name, "horizon": chain.horizon or ""}
            row.update(chain.filter_counts())
            rows.append(row)
        for name, reason in ingest.rejected:
            rows.append({"chain": name, "horizon": "", "rejected": reason})
        if not rows:
            return pd.DataFrame()
        frame = pd.DataFrame(rows)
        if "rejected" in frame:
            frame["rejected"] = frame["rejected"].fillna("")
        return frame.fillna(0)

    def write_to_run(self, resource_open, config):
        tables = [("calibration", self.results), ("pvalues", pvalue_table(self.results)),
                  ("filter_counts", self.filter_counts)]
        tables += [("densities_{}_{}".format(label, family), frame)
                   for (label, family), frame in sorted(self.densities.items())]
        for name, frame in tables:
            if frame.empty:
                continue
            with resource_open(name, "csv") as f:
                write_table(frame, f, config.hash, config.seed)
