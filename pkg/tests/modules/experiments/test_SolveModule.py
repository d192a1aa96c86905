import json
import os

import numpy as np
from nose.plugins.attrib import attr
from nose.tools import assert_equal, assert_true, assert_in, assert_is_none, assert_is_not_none

from frictionfolio.model.experiments.config import ExperimentConfig
from frictionfolio.modules.common.GenericModule import EXIT_SUCCESS
from frictionfolio.modules.experiments.SolveModule import SolveModule
from frictionfolio.ui.common import run_experiment
from frictionfolio.util.common.rundir import RunDirectory
from frictionfolio.util.common.tables import read_table, read_provenance
from tests.frictionfolio_test import TemporaryDirectoryTestCase, TEST_CONFIG_DIR


TINY = os.path.join(TEST_CONFIG_DIR, "tiny_solve.yml")


class TestSolveModule(TemporaryDirectoryTestCase):
    def setup(self):
        super(TestSolveModule, self).setup()
        self.module = SolveModule()

    def teardown(self):
        del self.module
        super(TestSolveModule, self).teardown()

    def resource_open(self, name, extension="csv"):
        return open(os.path.join(self.temporary_directory, name + "." + extension), "w", encoding="utf-8")

    def test_run(self):
        config = ExperimentConfig.load("solve", TINY)
        self.module.run(config)
        assert_equal(self.module.exit_code, EXIT_SUCCESS)
        assert_equal(len(self.module.report.iterations), 1)
        assert_is_not_none(self.module.mc_check)
        row = self.module.mc_check.iloc[0]
        assert_equal(row["n_paths"], 200)
        assert_true(row["mc_stderr"] > 0)

    def test_no_mc_check_without_paths(self):
        config = ExperimentConfig.load("solve", TINY, overrides=["mc.n_paths=0"])
        self.module.run(config)
        assert_is_none(self.module.mc_check)

    def test_write_to_run(self):
        config = ExperimentConfig.load("solve", TINY)
        self.module.run(config)
        self.module.write_to_run(self.resource_open, config)

        for name in ["trace.csv", "policy_vs_W.csv", "policy_vs_t.csv", "value_vs_W.csv", "mc_check.csv",
                     "policy.svg", "report.json"]:
            assert_true(os.path.isfile(os.path.join(self.temporary_directory, name)), name)

        with open(os.path.join(self.temporary_directory, "policy_vs_W.csv")) as f:
            assert_equal(read_provenance(f), {"config_hash": config.hash, "seed": str(config.seed)})
        with open(os.path.join(self.temporary_directory, "policy_vs_W.csv")) as f:
            by_wealth = read_table(f)
        assert_equal(list(by_wealth.columns), ["W", "omega"])
        assert_equal(len(by_wealth), 5)
        assert_true(np.all((by_wealth["omega"] > 0) & (by_wealth["omega"] < 1)))
        with open(os.path.join(self.temporary_directory, "policy_vs_t.csv")) as f:
            assert_equal(len(read_table(f)), 3)

        with open(os.path.join(self.temporary_directory, "report.json")) as f:
            rep = json.load(f)
        assert_equal(len(rep["iterations"]), 1)
        with open(os.path.join(self.temporary_directory, "policy.svg")) as f:
            assert_in("<svg", f.read())


class TestSolveExperiment(TemporaryDirectoryTestCase):
    def test_run_directory(self):
        exit_code, run_dir = run_experiment("solve", TINY, overrides=["mc.n_paths=0"], seed=3,
                                            output_root=self.temporary_directory)
        assert_equal(exit_code, EXIT_SUCCESS)
        assert_equal(os.path.dirname(run_dir.path), self.temporary_directory)
        assert_true(os.path.basename(run_dir.path).startswith("solve-"))

        manifest = RunDirectory.load_manifest(run_dir.path)
        assert_equal(manifest["command"], "solve")
        assert_equal(manifest["seed"], 3)
        assert_equal(manifest["status"], "completed")
        assert_equal(manifest["config_hash"], run_dir.config_hash)
        assert_equal(manifest["files"], sorted(["trace.csv", "policy_vs_W.csv", "policy_vs_t.csv", "value_vs_W.csv",
                                                "policy.svg", "report.json"]))
        assert_in("total", manifest["timings"])
        assert_equal(manifest["config"]["solver"]["hidden"], 4)

    def test_same_config_same_directory(self):
        _, first = run_experiment("solve", TINY, overrides=["mc.n_paths=0"], output_root=self.temporary_directory)
        _, second = run_experiment("solve", TINY, overrides=["mc.n_paths=0"], output_root=self.temporary_directory)
        _, other = run_experiment("solve", TINY, overrides=["mc.n_paths=0"], seed=1,
                                  output_root=self.temporary_directory)
        assert_equal(first.path, second.path)
        assert_true(first.path != other.path)
        with open(os.path.join(first.path, "policy_vs_W.csv")) as f:
            first_policy = read_table(f)
        _, again = run_experiment("solve", TINY, overrides=["mc.n_paths=0"], output_root=self.temporary_directory)
        with open(os.path.join(again.path, "policy_vs_W.csv")) as f:
            np.testing.assert_allclose(read_table(f)["omega"].values, first_policy["omega"].values)


class TestSolvePreset(object):
    @attr("slow")
    def test_value_agrees_with_simulation_under_learned_policy(self):
        module = SolveModule()
        module.run(ExperimentConfig.load("solve", overrides=["mc.n_paths=200000"]))
        assert_equal(module.exit_code, EXIT_SUCCESS)
        row = module.mc_check.iloc[0]
        assert_equal(row["n_paths"], 200000)
        assert_true(row["difference"] <= 3.0 * row["mc_stderr"] + 0.01,
                    (row["learned_value"], row["mc_estimate"], row["mc_stderr"]))
        assert_true(bool(row["passed"]))
