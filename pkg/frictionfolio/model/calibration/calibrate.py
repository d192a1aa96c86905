import logging
import time

import numpy as np

from frictionfolio.exceptions.common.exceptions import ConfigError, InvalidUserDataError
from frictionfolio.exceptions.model.exceptions import DensityEstimationError, SplineFitError, \
    BerkowitzInputError, NonFiniteValueError, ChainTooSmallError
from frictionfolio.model.calibration.berkowitz import berkowitz_tests, mc_adjust_pvalue, MIN_SERIES_LENGTH
from frictionfolio.model.calibration.chains import FilterConfig
from frictionfolio.model.calibration.density import rn_density, subjective_density, pit_transform, GRID_SIZE, \
    DELTA_RANGE
from frictionfolio.model.calibration.smile import fit_smile, DEFAULT_SMOOTHING
from frictionfolio.model.utility.utilities import starting_utility
from frictionfolio.util.common.helper import get_from_user_dict
from frictionfolio.util.common.type import StringRepresentationMixin, EqualityMixin
from frictionfolio.util.numerics.optimize import minimize, OptimizerConfig


log = logging.getLogger(__name__)

# objective value for parameters where the subjective density does not exist
INFEASIBLE_OBJECTIVE = np.inf
CALIBRATION_OPTIMIZER = OptimizerConfig(max_iter=100, gradient_tolerance=1e-5, learning_rate=0.1)


class CalibrationConfig(EqualityMixin, StringRepresentationMixin):
    def __init__(self, smoothing=DEFAULT_SMOOTHING, grid_size=GRID_SIZE, delta_range=DELTA_RANGE,
                 filters=None, optimizer=None, n_mc=None, min_chains=8):
        self.smoothing = float(smoothing)
        self.grid_size = int(grid_size)
        self.delta_range = tuple(float(x) for x in delta_range)
        self.filters = filters if filters is not None else FilterConfig()
        self.optimizer = optimizer if optimizer is not None else CALIBRATION_OPTIMIZER
        self.n_mc = n_mc
        self.min_chains = int(min_chains)

    @classmethod
    def from_yml_rep(cls, yml_rep):
        default = cls()
        delta_range = get_from_user_dict(yml_rep, "delta_range", list, list(default.delta_range))
        if len(delta_range) != 2:
            raise ConfigError("delta_range", InvalidUserDataError("delta_range needs exactly two values"))
        n_mc = get_from_user_dict(yml_rep, "n_mc", int, -1)
        return cls(smoothing=get_from_user_dict(yml_rep, "smoothing", float, default.smoothing),
                   grid_size=get_from_user_dict(yml_rep, "grid_size", int, default.grid_size),
                   delta_range=delta_range,
                   filters=FilterConfig.from_yml_rep(get_from_user_dict(yml_rep, "filters", dict, {})),
                   optimizer=CALIBRATION_OPTIMIZER.replace(**get_from_user_dict(yml_rep, "optimizer", dict, {})),
                   n_mc=None if n_mc < 0 else n_mc,
                   min_chains=get_from_user_dict(yml_rep, "min_chains", int, default.min_chains))

    def to_yml_rep(self):
        return {"smoothing": self.smoothing,
                "grid_size": self.grid_size,
                "delta_range": list(self.delta_range),
                "filters": self.filters.to_yml_rep(),
                "optimizer": self.optimizer.to_yml_rep(),
                "n_mc": -1 if self.n_mc is None else self.n_mc,
                "min_chains": self.min_chains}


class CalibrationPair(object):
    """A risk-neutral density and the realized price at its expiry."""

    def __init__(self, name, density, realization):
        self.name = name
        self.density = density
        self.realization = realization


def prepare_pairs(chains, realizations, config):
    """Risk-neutral densities for every chain with a realized price at expiry; chains whose smile or density cannot
    be estimated are skipped with a warning."""
    pairs = []
    for chain in chains:
        if chain.expiry not in realizations:
            log.warning("No realized price for chain {}, skipping it".format(chain.name))
            continue
        try:
            smile = fit_smile(chain, config.smoothing)
            density = rn_density(smile, chain, config.grid_size, config.delta_range)
        except (SplineFitError, DensityEstimationError, ChainTooSmallError) as e:
            log.warning(str(e))
            continue
        pairs.append(CalibrationPair(chain.name, density, realizations[chain.expiry]))
    return pairs


class CalibrationResult(StringRepresentationMixin):
    def __init__(self, family, utility, berkowitz, optimizer_result=None, n_pairs=0):
        self.family = family
        self.utility = utility
        self.berkowitz = berkowitz
        self.optimizer_result = optimizer_result
        self.n_pairs = n_pairs

    @property
    def converged(self):
        return self.optimizer_result is None or self.optimizer_result.converged

    def to_row(self):
        row = {"family": self.family, "n": self.n_pairs}
        row.update(dict(("param_" + k, float(getattr(self.utility, k))) for k in self.utility.PARAMETERS))
        b = self.berkowitz.to_row()
        for key in ["lr3", "p3", "lr1", "p1", "adjusted_p3", "adjusted_p1", "mu_hat", "sigma2_hat", "rho_hat"]:
            row[key] = b[key]
        row["converged"] = self.converged
        return row


def _pit(utility, pairs):
    densities = [subjective_density(pair.density, utility) for pair in pairs]
    return pit_transform([pair.realization for pair in pairs], densities), densities


def evaluate_utility(utility, pairs):
    """Berkowitz statistics of the subjective densities implied by ``utility``."""
    pit, densities = _pit(utility, pairs)
    return berkowitz_tests(pit.y), densities


def price_scale(pairs):
    """Median risk-neutral mean, which is the forward, across ``pairs``."""
    return float(np.median([pair.density.mean() for pair in pairs]))


def calibrate_utility(family, pairs, optimizer=None, n_mc=None, seed=0):
    """Fits the parameters of utility class ``family`` by minimising the Berkowitz LR3 statistic of the subjective
    densities over ``pairs``. The search starts from the family's starting point rescaled to the median forward of
    ``pairs``; positive parameters are optimised on a log scale and gradients are central differences.
    With ``n_mc`` the p-values are also adjusted by simulation under the fitted densities."""
    if optimizer is None:
        optimizer = CALIBRATION_OPTIMIZER
    if len(pairs) < MIN_SERIES_LENGTH:
        raise BerkowitzInputError("Calibration needs at least {} density/realization pairs, got {}"
                                  .format(MIN_SERIES_LENGTH, len(pairs)))
    start_time = time.time()
    start = starting_utility(family, price_scale(pairs))

    optimizer_result = None
    utility = start
    if start.PARAMETERS:
        def objective(z):
            try:
                result, _ = evaluate_utility(start.from_unconstrained(z), pairs)
            except (ConfigError, DensityEstimationError, BerkowitzInputError, FloatingPointError):
                return INFEASIBLE_OBJECTIVE
            return result.lr3

        try:
            optimizer_result = minimize(objective, start.to_unconstrained(), optimizer, jac="central")
        except NonFiniteValueError:
            raise DensityEstimationError("The {} family has no feasible subjective density at its starting "
                                         "parameters".format(family.VARIANT))
        utility = start.from_unconstrained(optimizer_result.x)
        if not optimizer_result.converged:
            log.warning("Calibration of the {} family stopped without converging: {}".format(
                family.VARIANT, optimizer_result.message))

    result, densities = evaluate_utility(utility, pairs)
    if n_mc is not None:
        mc_adjust_pvalue(result, densities, n_mc, seed)
    log.info("Finished calibrating the {} family on {} pairs in {:.2f}s (LR3 {:.4f})".format(
        family.VARIANT, len(pairs), time.time() - start_time, result.lr3))
    return CalibrationResult(family.VARIANT, utility, result, optimizer_result, len(pairs))
