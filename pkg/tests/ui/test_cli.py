import glob
import logging
import os

from nose.tools import assert_equal, assert_raises, assert_true

from frictionfolio.modules.common.GenericModule import EXIT_FAILURE, EXIT_TOLERANCE
from frictionfolio.ui.cli import main
from frictionfolio.util.common.rundir import RunDirectory
from tests.frictionfolio_test import TemporaryDirectoryTestCase, TEST_CHAIN_DIR, TEST_CONFIG_DIR


class TestCli(TemporaryDirectoryTestCase):
    def setup(self):
        super(TestCli, self).setup()
        self.handlers = list(logging.root.handlers)
        self.level = logging.root.level

    def teardown(self):
        logging.root.handlers = self.handlers
        logging.root.setLevel(self.level)
        super(TestCli, self).teardown()

    def run_directories(self, command):
        return glob.glob(os.path.join(self.temporary_directory, command + "-*"))

    def test_version(self):
        assert_equal(main(["--quiet", "version"]), 0)

    def test_unknown_command(self):
        assert_raises(SystemExit, main, ["--quiet", "optimize"])

    def test_calibrate_without_input(self):
        assert_equal(main(["--quiet", "calibrate", "--output", self.temporary_directory]), EXIT_FAILURE)

    def test_calibrate_options_become_config(self):
        exit_code = main(["--quiet", "calibrate", "--input", TEST_CHAIN_DIR, "--horizons", "2w,4w",
                          "--output", self.temporary_directory, "--set", "families=[linear]", "--seed", "5"])
        assert_equal(exit_code, EXIT_FAILURE)
        run_directories = self.run_directories("calibrate")
        assert_equal(len(run_directories), 1)
        manifest = RunDirectory.load_manifest(run_directories[0])
        assert_equal(manifest["config"]["input"], TEST_CHAIN_DIR)
        assert_equal(manifest["config"]["horizons"], ["2w", "4w"])
        assert_equal(manifest["config"]["families"], ["linear"])
        assert_equal(manifest["seed"], 5)

    def test_invalid_override(self):
        assert_equal(main(["--quiet", "solve", "--output", self.temporary_directory, "--set", "model.beta"]),
                     EXIT_FAILURE)
        assert_equal(self.run_directories("solve"), [])

    def test_tolerance_exit_code(self):
        exit_code = main(["--quiet", "validate-merton", os.path.join(TEST_CONFIG_DIR, "tiny_merton.yml"),
                          "--output", self.temporary_directory, "--set", "tolerance=0"])
        assert_equal(exit_code, EXIT_TOLERANCE)
        assert_true(len(self.run_directories("validate-merton")) == 1)
