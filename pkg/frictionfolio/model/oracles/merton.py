import numpy as np

from frictionfolio.exceptions.common.exceptions import ConfigError, InvalidUserDataError
from frictionfolio.model.market.params import ModelParams
from frictionfolio.model.solver.networks import Domain
from frictionfolio.model.utility.utilities import PowerUtility
from frictionfolio.util.common.helper import get_from_user_dict
from frictionfolio.util.common.type import EqualityMixin, StringRepresentationMixin
from frictionfolio.util.numerics import hyperdual as hd
from frictionfolio.util.numerics.hyperdual import HyperDual


class MertonSpec(EqualityMixin, StringRepresentationMixin):
    """Constant-volatility, frictionless market with a power-utility investor."""

    def __init__(self, gamma=0.5, r=0.02, mu=0.05, sigma=0.4, T=1.0):
        for name, ok, message in [("gamma", gamma > 0 and gamma != 1, "gamma must be positive and differ from 1"),
                                  ("sigma", sigma > 0, "sigma must be positive"),
                                  ("T", T > 0, "T must be positive")]:
            if not ok:
                raise ConfigError(name, InvalidUserDataError(message))
        self.gamma = float(gamma)
        self.r = float(r)
        self.mu = float(mu)
        self.sigma = float(sigma)
        self.T = float(T)

    @property
    def omega_star(self):
        return (self.mu - self.r) / (self.gamma * self.sigma ** 2)

    @property
    def growth(self):
        """a = (1 - gamma) * (r + (mu - r)**2 / (2 * gamma * sigma**2))."""
        return (1.0 - self.gamma) * (self.r + (self.mu - self.r) ** 2 / (2.0 * self.gamma * self.sigma ** 2))

    def utility(self):
        return PowerUtility(self.gamma)

    @classmethod
    def from_yml_rep(cls, yml_rep):
        default = cls()
        return cls(**dict((name, get_from_user_dict(yml_rep, name, float, getattr(default, name)))
                          for name in ["gamma", "r", "mu", "sigma", "T"]))

    def to_yml_rep(self):
        return {"gamma": self.gamma, "r": self.r, "mu": self.mu, "sigma": self.sigma, "T": self.T}


def merton_closed_form(spec, W, t):
    """Returns ``(value, omega_star)`` with value = W**(1-gamma)/(1-gamma) * exp(a*(T-t))."""
    W = np.asarray(W, dtype=float)
    t = np.asarray(t, dtype=float)
    value = W ** (1.0 - spec.gamma) / (1.0 - spec.gamma) * np.exp(spec.growth * (spec.T - t))
    return value, np.full(np.broadcast(W, t).shape, spec.omega_star)


def merton_value_function(spec):
    """The closed-form value as a function of a state batch, usable on plain arrays and hyper-dual inputs."""
    def value_fn(x):
        W = x[..., 0]
        t = x[..., 4]
        growth = hd.exp((spec.T - t) * spec.growth) if isinstance(t, HyperDual) else np.exp(
            spec.growth * (spec.T - t))
        return W ** (1.0 - spec.gamma) * (1.0 / (1.0 - spec.gamma)) * growth

    return value_fn


def merton_model_params(spec, base=None):
    """Model parameters reducing the general dynamics to the Merton problem: v frozen at sigma**2, no liquidity risk,
    no transaction costs, no correlation."""
    if base is None:
        base = ModelParams()
    zero = dict((name, 0.0) for name in ["kappa", "sigma1", "lam", "sigma2", "alpha", "sigma_L", "beta",
                                         "kappa_TC", "lambda_TC", "theta_hat_L", "rho1", "rho2", "rho3", "rho4",
                                         "rho5", "rho6"])
    zero.update(r=spec.r, mu=spec.mu, T=spec.T, gamma=spec.gamma, eta=spec.sigma ** 2)
    return base.replace(**zero)


def merton_domain(spec, W=(1.0, 10.0)):
    """A domain with only W and t live: v frozen at sigma**2, theta and L frozen."""
    v = spec.sigma ** 2
    return Domain(W=W, v=(v, v), theta=(0.2, 0.2), L=(0.0, 0.0), T=spec.T)
