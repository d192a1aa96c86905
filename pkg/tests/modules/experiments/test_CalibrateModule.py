import os

from nose.plugins.attrib import attr
from nose.tools import assert_equal, assert_true, assert_raises, assert_in

from frictionfolio.exceptions.common.exceptions import FileAccessError
from frictionfolio.exceptions.model.exceptions import NoChainsError
from frictionfolio.model.calibration.berkowitz import MIN_MC_REPLICATIONS
from frictionfolio.model.experiments.config import ExperimentConfig
from frictionfolio.modules.common.GenericModule import EXIT_SUCCESS, EXIT_FAILURE
from frictionfolio.modules.experiments.CalibrateModule import CalibrateModule, read_input_directory, pvalue_table
from frictionfolio.tools.synthetic_chains import write_synthetic_chains
from frictionfolio.ui.common import run_experiment
from frictionfolio.util.common.rundir import RunDirectory
from frictionfolio.util.common.tables import read_table
from tests.frictionfolio_test import TemporaryDirectoryTestCase, TEST_CHAIN_DIR


def quoted(path):
    return "input='{}'".format(path)


class TestCalibrateModule(TemporaryDirectoryTestCase):
    def setup(self):
        super(TestCalibrateModule, self).setup()
        self.module = CalibrateModule()
        self.chain_directory = os.path.join(self.temporary_directory, "chains")
        write_synthetic_chains(self.chain_directory, {"horizon_days": [28], "n_expiries": 10, "seed": 4})

    def teardown(self):
        del self.module
        super(TestCalibrateModule, self).teardown()

    def config(self, *overrides):
        return ExperimentConfig.load("calibrate", overrides=[quoted(self.chain_directory), "horizons=[4w]",
                                                             "calibration.filters.tick=0"] + list(overrides))

    def test_read_input_directory(self):
        chains, realizations = read_input_directory(self.chain_directory)
        assert_equal(len(realizations), 10)
        assert_equal(len(set(chains["expiry"])), 10)
        assert_raises(FileAccessError, read_input_directory, os.path.join(self.temporary_directory, "missing"))
        assert_raises(NoChainsError, read_input_directory, self.temporary_directory)

    def test_missing_input(self):
        assert_raises(NoChainsError, self.module.run, ExperimentConfig.load("calibrate"))

    def test_linear_family(self):
        self.module.run(self.config("families=[linear]"))
        assert_equal(self.module.exit_code, EXIT_SUCCESS)
        assert_equal(len(self.module.results), 1)
        row = self.module.results.iloc[0]
        assert_equal(row["family"], "linear")
        assert_equal(row["horizon"], "4w")
        assert_equal(row["status"], "ok")
        assert_true(0 <= row["p3"] <= 1)
        assert_equal(list(self.module.densities), [("4w", "linear")])
        assert_equal(len(self.module.filter_counts), 10)

        table = pvalue_table(self.module.results)
        assert_equal(list(table["family"]), ["linear"])
        assert_in("4w_p3", table.columns)

    def test_preset_adjusts_pvalues_by_simulation(self):
        assert_true(self.config().calibration_config().n_mc >= MIN_MC_REPLICATIONS)
        self.module.run(self.config("families=[linear]"))
        assert_equal(self.module.exit_code, EXIT_SUCCESS)
        row = self.module.results.iloc[0]
        assert_true(0.0 < row["adjusted_p3"] <= 1.0)
        assert_true(0.0 < row["adjusted_p1"] <= 1.0)
        # risk-neutral prices with realizations drawn from the same density
        assert_true(row["adjusted_p3"] > 0.05, row["adjusted_p3"])
        assert_in("4w_adjusted_p3", pvalue_table(self.module.results).columns)

    def test_too_few_chains_for_horizon(self):

        self.module.run(self.config("families=[linear]", "calibration.min_chains=11"))
        assert_equal(self.module.exit_code, EXIT_FAILURE)
        assert_true(self.module.results.empty)
        assert_in("No horizon bucket had enough chains to calibrate", self.module.notes)

    @attr("slow")
    def test_run_directory(self):
        exit_code, run_dir = run_experiment("calibrate", overrides=[
            quoted(self.chain_directory), "horizons=[4w]", "families=[linear, power]", "calibration.filters.tick=0"],
            output_root=self.temporary_directory)
        assert_equal(exit_code, EXIT_SUCCESS)
        manifest = RunDirectory.load_manifest(run_dir.path)
        for name in ["calibration.csv", "pvalues.csv", "filter_counts.csv", "densities_4w_linear.csv",
                     "densities_4w_power.csv"]:
            assert_in(name, manifest["files"])
        with open(os.path.join(run_dir.path, "densities_4w_linear.csv")) as f:
            densities = read_table(f)
        assert_equal(list(densities.columns), ["chain", "s", "q", "p"])
        with open(os.path.join(run_dir.path, "pvalues.csv")) as f:
            assert_equal(list(read_table(f)["family"]), ["linear", "power"])


class TestCalibrateFixture(TemporaryDirectoryTestCase):
    def test_too_few_chains(self):
        exit_code, run_dir = run_experiment("calibrate", overrides=[quoted(TEST_CHAIN_DIR), "families=[linear]"],
                                            output_root=self.temporary_directory)
        assert_equal(exit_code, EXIT_FAILURE)
        manifest = RunDirectory.load_manifest(run_dir.path)
        assert_equal(manifest["status"], "failed")
        assert_equal(manifest["files"], ["filter_counts.csv"])
        with open(os.path.join(run_dir.path, "filter_counts.csv")) as f:
            counts = read_table(f)
        assert_equal(len(counts), 2)
        assert_equal(sorted(counts["horizon"]), ["4w", "4w"])
