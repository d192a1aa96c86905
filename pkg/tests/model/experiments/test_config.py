from nose.tools import assert_equal, assert_raises, assert_true, assert_is_instance, assert_not_equal

from frictionfolio.exceptions.common.exceptions import ConfigError, InvalidUserDataError, FileAccessError
from frictionfolio.model.experiments.config import ExperimentConfig, Command, config_hash, parse_overrides
from frictionfolio.model.utility.envelope import ConcaveEnvelope
from frictionfolio.model.utility.utilities import SShapedUtility, LinearUtility, PowerUtility
from tests.frictionfolio_test import BaseTestCase, TemporaryWritableFileTestCase


def test_solve_preset():
    config = ExperimentConfig.load("solve")
    assert_equal(config.command, Command.SOLVE)
    assert_equal(config.seed, 0)
    assert_equal(config.model_params().beta, 0.3)
    assert_is_instance(config.utility(), SShapedUtility)
    assert_is_instance(config.terminal_utility(), ConcaveEnvelope)
    assert_equal(config.domain().W, (0.5, 12.0))
    assert_equal(config.domain().T, config.model_params().T)
    assert_equal(config.slice_state().W, 5.5)
    assert_equal(config.solver_config().hidden, 64)
    W_grid, t_grid = config.slice_grids()
    assert_equal(len(W_grid), 47)
    assert_equal((W_grid[0], W_grid[-1]), (0.5, 12.0))
    assert_equal(len(t_grid), 21)


def test_overrides_and_seed():
    config = ExperimentConfig.load("solve", overrides=["model.beta=0.5", "solver.hidden=8", "utility.variant=linear"],
                                   seed=3)
    assert_equal(config.model_params().beta, 0.5)
    assert_equal(config.model_params().kappa_TC, 0.004)
    assert_equal(config.solver_config().hidden, 8)
    assert_equal(config.solver_config().seed, 3)
    assert_equal(config.seed, 3)
    assert_equal(config.utility(), LinearUtility())
    assert_equal(config.terminal_utility(), LinearUtility())


def test_merton_preset():
    config = ExperimentConfig.load("validate-merton")
    spec = config.merton_spec()
    assert_equal(spec.sigma, 0.4)
    assert_equal(config.model_params().beta, 0.0)
    assert_equal(spec.utility(), PowerUtility(0.5))


def test_load_errors():
    assert_raises(InvalidUserDataError, ExperimentConfig.load, "optimize")
    assert_raises(FileAccessError, ExperimentConfig.load, "solve", "/nonexistent/config.yml")
    assert_raises(InvalidUserDataError, ExperimentConfig.load, "solve", None, ["model.beta"])
    with assert_raises(ConfigError) as cm:
        ExperimentConfig.load("solve", overrides=["slice.W=50"])
    assert_equal(cm.exception.field, "slice")
    with assert_raises(ConfigError) as cm:
        ExperimentConfig.load("solve", overrides=["model.beta=-1"])
    assert_equal(cm.exception.field, "beta")
    with assert_raises(ConfigError) as cm:
        ExperimentConfig.load("solve", overrides=["utility.variant=quadratic"])
    assert_equal(cm.exception.field, "utility")


def test_sweep_section():
    config = ExperimentConfig.load("sweep")
    assert_equal(config.sweep(), ("beta", [0.1, 0.3, 0.5]))
    assert_equal(config.sweep_baseline("beta"), 0.3)
    assert_equal(config.sweep_baseline("v0"), 0.1)
    assert_equal(ExperimentConfig.load("sweep", overrides=["sweep.variable=kappa-TC"]).sweep()[0], "kappa_TC")
    with assert_raises(ConfigError) as cm:
        ExperimentConfig.load("sweep", overrides=["sweep.variable=mu"])
    assert_equal(cm.exception.field, "sweep")
    assert_raises(ConfigError, ExperimentConfig.load, "sweep", None, ["sweep.values=[]"])


def test_calibrate_selection():
    config = ExperimentConfig.load("calibrate")
    assert_equal(config.calibration_horizons(), ["1w", "2w", "3w", "4w"])
    assert_equal(len(config.calibration_families()), 7)
    assert_equal(config.calibration_config().grid_size, 401)
    selected = ExperimentConfig.load("calibrate", overrides=["horizons=[4w, 1w]", "families=[power]"])
    assert_equal(selected.calibration_horizons(), ["1w", "4w"])
    assert_equal(selected.calibration_families(), [PowerUtility])
    for override, field in [("horizons=[5w]", "horizons"), ("horizons=[]", "horizons"),
                            ("families=[quadratic]", "families")]:
        with assert_raises(ConfigError) as cm:
            ExperimentConfig.load("calibrate", overrides=[override])
        assert_equal(cm.exception.field, field)


def test_config_hash():
    assert_equal(len(config_hash({"a": 1})), 16)
    assert_equal(config_hash({"a": 1, "b": [1, 2]}), config_hash({"b": [1, 2], "a": 1}))
    assert_not_equal(config_hash({"a": 1}), config_hash({"a": 2}))
    assert_equal(ExperimentConfig.load("solve").hash, ExperimentConfig.load("solve").hash)
    assert_not_equal(ExperimentConfig.load("solve").hash, ExperimentConfig.load("solve", seed=1).hash)


def test_parse_overrides():
    assert_equal(parse_overrides(["model.beta=0.5", "sweep.values=[0.1, 0.2]", "families = [power]"]),
                 {"model": {"beta": 0.5}, "sweep": {"values": [0.1, 0.2]}, "families": ["power"]})
    assert_equal(parse_overrides(None), {})


class TestUserConfigFile(BaseTestCase, TemporaryWritableFileTestCase):
    def test_file_is_merged_over_preset(self):
        self.temporary_wo_file.write("model:\n  beta: 0.7\nsolver:\n  hidden: 12\n")
        self.temporary_wo_file.close()
        config = ExperimentConfig.load("solve", self.temporary_wo_file_name, ["solver.hidden=10"])
        assert_equal(config.model_params().beta, 0.7)
        assert_equal(config.solver_config().hidden, 10)
        assert_equal(config.solver_config().n_interior, 4000)
        assert_true("params" not in config.rep)
