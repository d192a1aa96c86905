import logging

import numpy as np
from scipy.stats import chi2, norm

from frictionfolio.exceptions.model.exceptions import BerkowitzInputError, NonFiniteValueError
from frictionfolio.model.calibration.density import pit_transform
from frictionfolio.util.common.rng import substream
from frictionfolio.util.common.type import StringRepresentationMixin
from frictionfolio.util.numerics import tape
from frictionfolio.util.numerics.optimize import minimize, OptimizerConfig


log = logging.getLogger(__name__)

MIN_SERIES_LENGTH = 8
MIN_MC_REPLICATIONS = 100
RHO_START_BOUND = 0.95
AR1_OPTIMIZER = OptimizerConfig(max_iter=200, gradient_tolerance=1e-10)


class Ar1Fit(StringRepresentationMixin):
    def __init__(self, mu, sigma2, rho, loglik, converged=True):
        self.mu = mu
        self.sigma2 = sigma2
        self.rho = rho
        self.loglik = loglik
        self.converged = converged


class BerkowitzResult(StringRepresentationMixin):
    def __init__(self, n, fit, independent, lr3, lr1, p3, p1, adjusted_p3=None, adjusted_p1=None):
        self.n = n
        self.fit = fit
        # the fitted mu and sigma2 with rho = 0
        self.independent = independent
        self.lr3 = lr3
        self.lr1 = lr1
        self.p3 = p3
        self.p1 = p1
        self.adjusted_p3 = adjusted_p3
        self.adjusted_p1 = adjusted_p1

    @property
    def mu_hat(self):
        return self.fit.mu

    @property
    def sigma2_hat(self):
        return self.fit.sigma2

    @property
    def rho_hat(self):
        return self.fit.rho

    def to_row(self):
        return {"n": self.n, "mu_hat": self.mu_hat, "sigma2_hat": self.sigma2_hat, "rho_hat": self.rho_hat,
                "lr3": self.lr3, "p3": self.p3, "lr1": self.lr1, "p1": self.p1,
                "adjusted_p3": self.adjusted_p3, "adjusted_p1": self.adjusted_p1}


def ar1_loglik(z, mu, sigma2, rho):
    """Exact Gaussian AR(1) log-likelihood, the first observation drawn from the stationary law.

    ``mu``, ``sigma2`` and ``rho`` may be tape variables."""
    z = np.asarray(z, dtype=float)
    n = len(z)
    first = z[0] - mu
    innovations = (z[1:] - mu) - rho * (z[:-1] - mu)
    stationary = 1.0 - rho * rho
    return (-0.5 * n * np.log(2.0 * np.pi)
            - 0.5 * tape.log(sigma2 / stationary)
            - stationary * first * first / (2.0 * sigma2)
            - 0.5 * (n - 1) * tape.log(sigma2)
            - tape.total(innovations * innovations) / (2.0 * sigma2))


def _ols_start(z):
    x, y = z[:-1], z[1:]
    rho = np.clip(np.cov(x, y, bias=True)[0, 1] / max(np.var(x), 1e-12), -RHO_START_BOUND, RHO_START_BOUND)
    c = y.mean() - rho * x.mean()
    mu = c / (1.0 - rho)
    sigma2 = max(np.var(y - c - rho * x), 1e-8)
    return np.array([mu, np.log(sigma2), np.arctanh(rho)])


def restricted_fit(z):
    """Maximum likelihood with rho = 0, in closed form."""
    mu = float(np.mean(z))
    sigma2 = float(np.mean((z - mu) ** 2))
    return Ar1Fit(mu, sigma2, 0.0, float(ar1_loglik(z, mu, sigma2, 0.0)))


def independent_fit(z, fit):
    """``fit`` with rho set to 0 and mu, sigma2 left at their fitted values."""
    return Ar1Fit(fit.mu, fit.sigma2, 0.0, float(ar1_loglik(z, fit.mu, fit.sigma2, 0.0)))


def fit_ar1(z):
    """Maximum likelihood AR(1) fit over (mu, log sigma2, atanh rho), started from least squares. Falls back on the
    restricted fit if the optimizer ends below it."""
    z = np.asarray(z, dtype=float)

    def loss(params):
        return -ar1_loglik(z, params[0], tape.exp(params[1]), tape.tanh(params[2])) / len(z)

    restricted = restricted_fit(z)
    try:
        result = minimize(loss, _ols_start(z), AR1_OPTIMIZER)
    except NonFiniteValueError:
        log.debug("AR(1) fit failed to start, using the restricted fit")
        return restricted
    mu, log_sigma2, atanh_rho = result.x
    fit = Ar1Fit(float(mu), float(np.exp(log_sigma2)), float(np.tanh(atanh_rho)), -result.fun * len(z),
                 result.converged)
    if not np.isfinite(fit.loglik) or fit.loglik < restricted.loglik:
        return restricted
    return fit


def berkowitz_tests(y):
    """Likelihood ratio tests of z = Phi^-1(y) against iid N(0, 1): LR3 jointly on (mu, sigma2, rho) with 3 degrees
    of freedom, LR1 on independence alone with 1. LR1 compares the AR(1) fit with the same mu and sigma2 at rho = 0,
    so it can exceed LR3 when the fitted marginal is further from N(0, 1) than the standard normal itself."""
    y = np.asarray(y, dtype=float)
    if len(y) < MIN_SERIES_LENGTH:
        raise BerkowitzInputError("The Berkowitz tests need at least {} observations, got {}"
                                  .format(MIN_SERIES_LENGTH, len(y)))
    if not np.all(np.isfinite(y)) or np.any(y <= 0) or np.any(y >= 1):
        raise BerkowitzInputError("Probability integral transforms must lie strictly inside (0, 1)")
    z = norm.ppf(y)
    fit = fit_ar1(z)
    independent = independent_fit(z, fit)
    null = float(ar1_loglik(z, 0.0, 1.0, 0.0))
    lr3 = max(2.0 * (fit.loglik - null), 0.0)
    lr1 = max(2.0 * (fit.loglik - independent.loglik), 0.0)
    return BerkowitzResult(len(y), fit, independent, lr3, lr1, float(chi2.sf(lr3, 3)), float(chi2.sf(lr1, 1)))


def exceedance_pvalue(observed, simulated):
    """(1 + #{simulated >= observed}) / (n + 1)."""
    simulated = np.asarray(simulated, dtype=float)
    return (1.0 + np.count_nonzero(simulated >= observed)) / (len(simulated) + 1.0)


def simulate_statistics(densities, n_mc, seed):
    """LR3 and LR1 for ``n_mc`` pseudo-realization sets drawn from ``densities`` themselves; replication ``i`` draws
    from its own substream of ``seed``."""
    if n_mc < MIN_MC_REPLICATIONS:
        raise BerkowitzInputError("Monte Carlo adjustment needs at least {} replications, got {}"
                                  .format(MIN_MC_REPLICATIONS, n_mc))
    lr3 = np.empty(n_mc)
    lr1 = np.empty(n_mc)
    for i in range(n_mc):
        rng = substream(seed, i)
        u = rng.uniform(size=len(densities))
        pseudo = [d.ppf(x) for d, x in zip(densities, u)]
        result = berkowitz_tests(pit_transform(pseudo, densities).y)
        lr3[i] = result.lr3
        lr1[i] = result.lr1
    return lr3, lr1


def mc_adjust_pvalue(result, densities, n_mc, seed):
    """Fills in finite-sample p-values for ``result`` from the simulated null distribution of the statistics under
    ``densities``."""
    lr3, lr1 = simulate_statistics(densities, n_mc, seed)
    result.adjusted_p3 = exceedance_pvalue(result.lr3, lr3)
    result.adjusted_p1 = exceedance_pvalue(result.lr1, lr1)
    return result
