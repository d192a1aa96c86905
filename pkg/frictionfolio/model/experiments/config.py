import hashlib
import json
import logging
import os

from frictionfolio.exceptions.common.exceptions import ConfigError, InvalidUserDataError, FileAccessError, \
    MissingUserDataError, InvalidArgumentError
from frictionfolio.model.calibration.calibrate import CalibrationConfig
from frictionfolio.model.calibration.chains import HORIZONS
from frictionfolio.model.market.params import ModelParams, MarketState
from frictionfolio.model.oracles.merton import MertonSpec
from frictionfolio.model.solver.networks import Domain
from frictionfolio.model.solver.policy_iteration import SolverConfig
from frictionfolio.model.utility.envelope import concavify
from frictionfolio.model.utility.utilities import utility_from_yml_rep, SShapedUtility, CALIBRATION_FAMILIES, \
    variant_class
from frictionfolio.util.common.assets import open_asset
from frictionfolio.util.common.helper import get_from_user_dict
from frictionfolio.util.common.type import GenericEnum
from frictionfolio.util.common.yml import yml_load, yml_load_file, merge_yml_reps, set_dotted, parse_yml_scalar


log = logging.getLogger(__name__)

Command = GenericEnum.create("Command", ["calibrate", "solve", "validate-merton", "sweep"])
SWEEP_VARIABLES = ["beta", "kappa_TC", "sigma_L", "v0"]
SweepVariable = GenericEnum.create("SweepVariable", SWEEP_VARIABLES)

CONFIG_HASH_LENGTH = 16


def _load_asset_yml(*path):
    with open_asset(*path) as f:
        return yml_load(f) or {}


def config_hash(rep):
    canonical = json.dumps(rep, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:CONFIG_HASH_LENGTH]


def parse_overrides(assignments):
    """``["a.b=1", ...]`` into a nested override mapping."""
    overrides = {}
    for assignment in assignments or []:
        if "=" not in assignment:
            raise InvalidUserDataError("Override \"{}\" is not of the form key=value".format(assignment))
        key, value = assignment.split("=", 1)
        set_dotted(overrides, key.strip(), parse_yml_scalar(value))
    return overrides


class ExperimentConfig(object):
    """A fully resolved experiment configuration: the bundled preset for the command, then the user's file, then
    ``--set`` overrides and ``--seed``, with the model parameter preset expanded in place."""

    def __init__(self, command, rep):
        self.command = command
        self.rep = rep
        self.validate()

    @classmethod
    def load(cls, command, path=None, overrides=None, seed=None):
        if not Command.is_valid(command):
            raise InvalidUserDataError("Unknown command \"{}\"".format(command))
        rep = _load_asset_yml("experiments", command + ".yml")
        if path is not None:
            if not os.path.isfile(path):
                raise FileAccessError("Config file {} does not exist".format(path))
            rep = merge_yml_reps(rep, yml_load_file(path) or {})
        rep = merge_yml_reps(rep, parse_overrides(overrides))
        if seed is not None:
            rep["seed"] = int(seed)
        rep.setdefault("seed", 0)

        preset = rep.pop("params", "default")
        params_rep = _load_asset_yml("params", preset + ".yml") if isinstance(preset, str) else {}
        rep["model"] = merge_yml_reps(params_rep, rep.get("model") or {})
        return cls(command, rep)

    @property
    def seed(self):
        return get_from_user_dict(self.rep, "seed", int)

    @property
    def hash(self):
        return config_hash(self.rep)

    def section(self, name):
        return get_from_user_dict(self.rep, name, dict, {})

    def validate(self):
        self.model_params()
        if self.command in [Command.SOLVE, Command.SWEEP]:
            domain = self.domain()
            self.utility()
            state = self.slice_state()
            if not domain.contains(state.to_array()):
                raise ConfigError("slice", InvalidUserDataError("Slice {} lies outside the solver domain".format(
                    state.to_yml_rep())))
        if self.command == Command.CALIBRATE:
            self.calibration_config()
            self.calibration_families()
            self.calibration_horizons()
        if self.command == Command.SWEEP:
            self.sweep()

    def model_params(self):
        return ModelParams.from_yml_rep(self.rep["model"])

    def merton_spec(self):
        return MertonSpec.from_yml_rep(self.section("merton"))

    def terminal_utility(self):
        """The utility as configured, concavified if it is S-shaped."""
        u = self.utility()
        if isinstance(u, SShapedUtility):
            return concavify(u)
        return u

    def utility(self):
        try:
            return utility_from_yml_rep(self.section("utility"))
        except InvalidUserDataError as e:
            raise ConfigError("utility", e)

    def domain(self):
        rep = dict(self.section("domain"))
        rep.setdefault("T", self.model_params().T)
        return Domain.from_yml_rep(rep)

    def solver_config(self):
        rep = dict(self.section("solver"))
        rep.setdefault("seed", self.seed)
        return SolverConfig.from_yml_rep(rep)

    def slice_state(self):
        rep = self.section("slice")
        try:
            return MarketState(**dict((name, get_from_user_dict(rep, name, float))
                                      for name in MarketState.COORDINATES))
        except MissingUserDataError as e:
            raise ConfigError("slice", e)

    def slice_grids(self):
        """Wealth and time grids the policy slices are drawn over."""
        rep = self.section("slice_grids")
        domain = self.domain()
        n_W = get_from_user_dict(rep, "n_W", int, 47)
        n_t = get_from_user_dict(rep, "n_t", int, 21)
        return (list(_linspace(domain.W[0], domain.W[1], n_W)), list(_linspace(0.0, domain.T, n_t)))

    def sweep(self):
        rep = self.section("sweep")
        try:
            variable = get_from_user_dict(rep, "variable", str)
            values = [float(v) for v in get_from_user_dict(rep, "values", list)]
        except InvalidUserDataError as e:
            raise ConfigError("sweep", e)
        try:
            member = SweepVariable.fromstring(variable)
        except InvalidArgumentError:
            raise ConfigError("sweep", InvalidUserDataError("Sweep variable must be one of {}, got \"{}\"".format(
                ", ".join(SWEEP_VARIABLES), variable)))
        # back to the parameter's own spelling, e.g. kappa_TC
        variable = dict((SweepVariable.fromstring(v), v) for v in SWEEP_VARIABLES)[member]
        if not values:
            raise ConfigError("sweep", InvalidUserDataError("Sweep value list is empty"))
        return variable, values

    def sweep_baseline(self, variable):
        if variable == SweepVariable.V0:
            return self.slice_state().v
        return self.model_params().get(variable)

    def calibration_config(self):
        return CalibrationConfig.from_yml_rep(self.section("calibration"))

    def calibration_families(self):
        names = get_from_user_dict(self.rep, "families", list, [c.VARIANT for c in CALIBRATION_FAMILIES])
        try:
            return [variant_class(name) for name in names]
        except InvalidUserDataError as e:
            raise ConfigError("families", e)

    def calibration_horizons(self):
        labels = [HORIZONS[h] for h in sorted(HORIZONS)]
        selected = get_from_user_dict(self.rep, "horizons", list, labels)
        unknown = [h for h in selected if h not in labels]
        if unknown or not selected:
            raise ConfigError("horizons", InvalidUserDataError("Horizons must be a non-empty subset of {}"
                                                               .format(", ".join(labels))))
        return [h for h in labels if h in selected]

    def to_json_rep(self):
        return self.rep


def _linspace(lo, hi, n):
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1.0) for i in range(n)]
