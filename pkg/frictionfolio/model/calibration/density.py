import logging

import numpy as np
import pandas as pd
from scipy.integrate import cumulative_trapezoid, trapezoid

from frictionfolio.exceptions.common.exceptions import InvalidArgumentError, DomainViolationError
from frictionfolio.exceptions.model.exceptions import DensityEstimationError
from frictionfolio.model.calibration.chains import black_call, strike_from_delta
from frictionfolio.util.common.type import StringRepresentationMixin


log = logging.getLogger(__name__)

GRID_SIZE = 401
DELTA_RANGE = (0.01, 0.99)
DENSE_DELTA_POINTS = 4001
MAX_CLIPPED_MASS = 0.05
MASS_WARNING_RANGE = (0.98, 1.02)
PIT_EPSILON = 1e-6


class DensityEstimate(StringRepresentationMixin):
    """A probability density tabulated on an increasing, uniform price grid, integrating to 1 by trapezoid rule."""

    def __init__(self, grid, density, raw_mass=1.0, clipped_mass=0.0):
        self.grid = np.asarray(grid, dtype=float)
        self.density = np.asarray(density, dtype=float)
        self.raw_mass = raw_mass
        self.clipped_mass = clipped_mass
        self._cdf = None

    @property
    def lower(self):
        return float(self.grid[0])

    @property
    def upper(self):
        return float(self.grid[-1])

    def mass(self):
        return float(trapezoid(self.density, self.grid))

    def cdf_values(self):
        if self._cdf is None:
            c = cumulative_trapezoid(self.density, self.grid, initial=0.0)
            self._cdf = c / c[-1]
        return self._cdf

    def cdf(self, x):
        return np.interp(x, self.grid, self.cdf_values(), left=0.0, right=1.0)

    def ppf(self, u):
        c = self.cdf_values()
        # flat stretches of the cdf make the inverse ambiguous; keep the first grid point of each level
        keep = np.concatenate([[True], np.diff(c) > 0])
        return np.interp(u, c[keep], self.grid[keep])

    def mean(self):
        return float(trapezoid(self.grid * self.density, self.grid))

    def sample(self, rng, n):
        return self.ppf(rng.uniform(size=n))

    def to_frame(self):
        return pd.DataFrame({"price": self.grid, "density": self.density, "cdf": self.cdf_values()})


def renormalized(grid, density, raw_mass=None, clipped_mass=0.0):
    mass = float(trapezoid(density, grid))
    if not mass > 0 or not np.isfinite(mass):
        raise DensityEstimationError("Density has no positive finite mass to normalize")
    return DensityEstimate(grid, density / mass, mass if raw_mass is None else raw_mass, clipped_mass)


def _strike_map(smile, chain, delta_range):
    deltas = np.linspace(delta_range[0], delta_range[1], DENSE_DELTA_POINTS)
    sigmas = smile(deltas)
    if np.any(sigmas <= 0):
        raise DensityEstimationError("Smile of chain {} turns non-positive inside the delta range"
                                     .format(chain.name))
    strikes = strike_from_delta(deltas, chain.forward, sigmas, chain.tau)
    # strike falls as delta rises; reverse into increasing strike order
    strikes, sigmas = strikes[::-1], sigmas[::-1]
    if np.any(np.diff(strikes) <= 0):
        raise DensityEstimationError("Delta-to-strike map of chain {} is not monotone; the smile is too steep"
                                     .format(chain.name))
    return strikes, sigmas


def rn_density(smile, chain, grid_size=GRID_SIZE, delta_range=DELTA_RANGE, max_clipped_mass=MAX_CLIPPED_MASS):
    """Risk-neutral density by second strike differences of smile-implied call prices.

    Strikes are uniform between the images of the two ends of ``delta_range``; volatilities at each strike come
    from the smile through the delta-to-strike map. Negative values are clipped to 0, and the estimate is rejected
    if the clipped share exceeds ``max_clipped_mass``."""
    lo, hi = delta_range
    if not 0 < lo < hi < 1:
        raise InvalidArgumentError("Delta range must satisfy 0 < low < high < 1, got {}".format(delta_range))
    if grid_size < 3:
        raise InvalidArgumentError("Density grid needs at least 3 points, got {}".format(grid_size))

    strike_map, sigma_map = _strike_map(smile, chain, delta_range)
    grid = np.linspace(strike_map[0], strike_map[-1], grid_size)
    h = grid[1] - grid[0]
    extended = np.concatenate([[grid[0] - h], grid, [grid[-1] + h]])
    if extended[0] <= 0:
        raise DensityEstimationError("Density grid of chain {} reaches non-positive strikes".format(chain.name))
    sigma = np.interp(extended, strike_map, sigma_map)
    calls = black_call(chain.forward, extended, sigma, chain.tau, chain.rate)
    q = np.exp(chain.rate * chain.tau) * (calls[2:] - 2.0 * calls[1:-1] + calls[:-2]) / h ** 2

    positive = float(trapezoid(np.maximum(q, 0.0), grid))
    negative = float(trapezoid(np.maximum(-q, 0.0), grid))
    if not positive > 0:
        raise DensityEstimationError("Density of chain {} has no positive mass".format(chain.name))
    clipped = negative / positive
    if clipped > max_clipped_mass:
        raise DensityEstimationError("Density of chain {} loses {:.1%} of its mass to negative values (limit {:.1%})"
                                     .format(chain.name, clipped, max_clipped_mass))
    raw_mass = float(trapezoid(q, grid))
    if not MASS_WARNING_RANGE[0] <= raw_mass <= MASS_WARNING_RANGE[1]:
        log.warning("Risk-neutral density of chain {} integrates to {:.4f} before normalization"
                    .format(chain.name, raw_mass))
    return renormalized(grid, np.maximum(q, 0.0), raw_mass=raw_mass, clipped_mass=clipped)


def subjective_density(q, utility):
    """p(x) proportional to q(x) / U'(x) on the grid of ``q``."""
    try:
        marginal = np.asarray(utility.marginal(q.grid), dtype=float)
    except DomainViolationError as e:
        raise DensityEstimationError("Marginal utility undefined on the density grid: {}".format(e))
    if not np.all(np.isfinite(marginal)) or np.any(marginal <= 0):
        raise DensityEstimationError("Marginal utility of {} is not positive and finite on [{:.4g}, {:.4g}]"
                                     .format(utility.VARIANT, q.lower, q.upper))
    return renormalized(q.grid, q.density / marginal)


class PitSeries(StringRepresentationMixin):
    def __init__(self, y, clamped):
        self.y = y
        # realizations outside the support of their density
        self.clamped = clamped

    def __len__(self):
        return len(self.y)


def pit_transform(realizations, densities, epsilon=PIT_EPSILON):
    """Probability integral transforms y_t = F_t(x_t), clamped to [epsilon, 1 - epsilon]."""
    if len(realizations) != len(densities):
        raise InvalidArgumentError("Got {} realizations for {} densities".format(len(realizations), len(densities)))
    y = np.empty(len(densities))
    clamped = np.zeros(len(densities), dtype=bool)
    for i, (x, density) in enumerate(zip(realizations, densities)):
        y[i] = density.cdf(x)
        clamped[i] = x < density.lower or x > density.upper
    if np.any(clamped):
        log.warning("{} realization(s) fall outside the support of their density".format(int(clamped.sum())))
    return PitSeries(np.clip(y, epsilon, 1.0 - epsilon), clamped)
