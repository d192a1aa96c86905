import numpy as np
from nose.tools import assert_equal, assert_raises, assert_true, assert_almost_equal
from numpy.testing import assert_allclose
from scipy.integrate import trapezoid
from scipy.stats import lognorm, kstest

from frictionfolio.exceptions.common.exceptions import InvalidArgumentError
from frictionfolio.exceptions.model.exceptions import DensityEstimationError
from frictionfolio.model.calibration.chains import OptionChain
from frictionfolio.model.calibration.density import DensityEstimate, rn_density, subjective_density, \
    pit_transform, renormalized
from frictionfolio.model.utility.utilities import LinearUtility, PowerUtility


VOL = 0.2
CHAIN = OptionChain("2021-03-01", "2021-03-29", 100.0, 0.02, [])


def flat_smile(delta):
    return np.full(np.shape(delta), VOL)


def lognormal(chain, vol, tilt=0.0):
    s = vol * np.sqrt(chain.tau)
    m = np.log(chain.forward) - 0.5 * s ** 2 + tilt * s ** 2
    return lognorm(s=s, scale=np.exp(m))


def l1_to_truth(estimate, truth):
    # truth restricted to the grid and renormalized
    target = truth.pdf(estimate.grid)
    target = target / trapezoid(target, estimate.grid)
    return trapezoid(np.abs(estimate.density - target), estimate.grid)


def test_flat_vol_recovers_lognormal():
    q = rn_density(flat_smile, CHAIN)
    assert_equal(len(q.grid), 401)
    assert_true(np.all(q.density >= 0))
    assert_almost_equal(q.mass(), 1.0)
    assert_true(l1_to_truth(q, lognormal(CHAIN, VOL)) < 0.02)
    assert_true(abs(q.mean() / CHAIN.forward - 1.0) < 0.005)
    assert_true(0.95 < q.raw_mass <= 1.0)
    assert_equal(q.clipped_mass, 0.0)


def test_linear_utility_keeps_density():
    q = rn_density(flat_smile, CHAIN)
    p = subjective_density(q, LinearUtility())
    assert_allclose(p.density, q.density, rtol=1e-12)


def test_power_utility_tilts_lognormal():
    q = rn_density(flat_smile, CHAIN, delta_range=(1e-4, 1 - 1e-4), grid_size=1601)
    p = subjective_density(q, PowerUtility(2.0))
    assert_almost_equal(p.mass(), 1.0)
    assert_true(l1_to_truth(p, lognormal(CHAIN, VOL, tilt=2.0)) < 0.01)
    assert_true(p.mean() > q.mean())


def test_subjective_density_ignores_scale():
    q = rn_density(flat_smile, CHAIN)
    doubled = DensityEstimate(q.grid, 2.0 * q.density)
    assert_allclose(subjective_density(doubled, PowerUtility(2.0)).density,
                    subjective_density(q, PowerUtility(2.0)).density, rtol=1e-12)


class DecreasingUtility(object):
    VARIANT = "decreasing"

    def marginal(self, W):
        return -np.ones_like(W)


def test_subjective_density_errors():
    q = rn_density(flat_smile, CHAIN)
    assert_raises(DensityEstimationError, subjective_density, q, DecreasingUtility())
    at_zero = DensityEstimate(np.linspace(0.0, 2.0, 5), np.ones(5))
    assert_raises(DensityEstimationError, subjective_density, at_zero, PowerUtility(2.0))


def test_rn_density_errors():
    assert_raises(InvalidArgumentError, rn_density, flat_smile, CHAIN, 401, (0.5, 0.4))
    assert_raises(InvalidArgumentError, rn_density, flat_smile, CHAIN, 401, (0.0, 0.9))
    assert_raises(InvalidArgumentError, rn_density, flat_smile, CHAIN, 2)
    assert_raises(DensityEstimationError, rn_density, lambda d: 0.2 - 0.5 * d, CHAIN)
    assert_raises(DensityEstimationError, rn_density, lambda d: 0.2 + 0.08 * np.sin(60 * d), CHAIN)
    assert_raises(DensityEstimationError, renormalized, np.linspace(0, 1, 3), np.zeros(3))


def test_cdf_and_ppf():
    q = rn_density(flat_smile, CHAIN)
    median = float(q.ppf(0.5))
    assert_almost_equal(float(q.cdf(median)), 0.5)
    assert_equal(float(q.cdf(q.lower)), 0.0)
    assert_equal(float(q.cdf(q.upper)), 1.0)
    assert_allclose(q.cdf(q.ppf(np.array([0.1, 0.25, 0.9]))), [0.1, 0.25, 0.9], atol=1e-12)
    frame = q.to_frame()
    assert_equal(list(frame.columns), ["price", "density", "cdf"])


def test_pit_transform():
    q = rn_density(flat_smile, CHAIN)
    median = float(q.ppf(0.5))
    pit = pit_transform([median, q.lower, q.upper + 10.0], [q, q, q])
    assert_almost_equal(pit.y[0], 0.5)
    assert_almost_equal(pit.y[1], 1e-6)
    assert_almost_equal(pit.y[2], 1.0 - 1e-6)
    assert_equal(list(pit.clamped), [False, False, True])
    assert_equal(len(pit), 3)
    assert_raises(InvalidArgumentError, pit_transform, [median], [q, q])


def test_pit_of_own_draws_is_uniform():
    q = rn_density(flat_smile, CHAIN)
    rng = np.random.default_rng(8)
    draws = q.sample(rng, 10000)
    pit = pit_transform(draws, [q] * len(draws))
    assert_true(kstest(pit.y, "uniform").pvalue > 0.001)
