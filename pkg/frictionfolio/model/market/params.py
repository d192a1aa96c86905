from fractions import Fraction
import numbers

import numpy as np

from frictionfolio.exceptions.common.exceptions import ConfigError, InvalidUserDataError, DomainViolationError
from frictionfolio.util.common.type import EqualityMixin, StringRepresentationMixin


# (yml key, attribute name, default). Defaults follow the default-parameter table; xi is not listed there.
PARAMETER_FIELDS = [
    ("r", "r", 0.01),
    ("mu", "mu", 0.05),
    ("kappa", "kappa", 5.0),
    ("sigma1", "sigma1", 0.1),
    ("lambda", "lam", 1.5),
    ("eta", "eta", 0.15),
    ("sigma2", "sigma2", 0.1),
    ("alpha", "alpha", 2.0),
    ("theta_hat_L", "theta_hat_L", 0.6),
    ("lambda_TC", "lambda_TC", 5.0),
    ("kappa_TC", "kappa_TC", 0.004),
    ("xi", "xi", 0.5),
    ("sigma_L", "sigma_L", 0.2),
    ("beta", "beta", 0.3),
    ("rho1", "rho1", 0.5),
    ("rho2", "rho2", 0.2),
    ("rho3", "rho3", 0.3),
    ("rho4", "rho4", 0.5),
    ("rho5", "rho5", 0.5),
    ("rho6", "rho6", 0.5),
    ("delta_t", "delta_t", 1.0 / 12),
    ("T", "T", 1.0),
    ("gamma", "gamma", 0.5),
]

NONNEGATIVE_FIELDS = ["kappa", "sigma1", "lambda", "eta", "sigma2", "alpha", "theta_hat_L", "lambda_TC", "sigma_L",
                      "beta"]
CORRELATION_FIELDS = ["rho1", "rho2", "rho3", "rho4", "rho5", "rho6"]


def _parse_number(key, value):
    if isinstance(value, bool):
        raise ConfigError(key, InvalidUserDataError("Value {!r} is not a number".format(value)))
    if isinstance(value, numbers.Real):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.replace(" ", "")))
        except (ValueError, ZeroDivisionError):
            pass
    raise ConfigError(key, InvalidUserDataError("Value {!r} is not a number".format(value)))


class ModelParams(EqualityMixin, StringRepresentationMixin):
    """Every market, volatility, liquidity and cost parameter of the model.

    Keyword names follow the yml keys, except that the theta-process speed ``lambda`` is the attribute ``lam``.
    ``beta`` may be 0, which is how the Merton reduction switches liquidity off."""

    def __init__(self, **kwargs):
        unknown = set(kwargs) - set(f[0] for f in PARAMETER_FIELDS) - set(f[1] for f in PARAMETER_FIELDS)
        if unknown:
            raise ConfigError(sorted(unknown)[0], InvalidUserDataError("Unknown model parameter"))
        for key, attr, default in PARAMETER_FIELDS:
            value = kwargs.get(key, kwargs.get(attr, default))
            setattr(self, attr, _parse_number(key, value))
        self.validate()

    def validate(self):
        for key, attr, _ in PARAMETER_FIELDS:
            if not np.isfinite(getattr(self, attr)):
                raise ConfigError(key, InvalidUserDataError("Value must be finite"))
        for key in NONNEGATIVE_FIELDS:
            if self.get(key) < 0:
                raise ConfigError(key, InvalidUserDataError("Value must be nonnegative, got {}".format(self.get(key))))
        for key in CORRELATION_FIELDS:
            if not -1.0 <= self.get(key) <= 1.0:
                raise ConfigError(key, InvalidUserDataError("Correlation must lie in [-1, 1], got {}"
                                                            .format(self.get(key))))
        if not 0.0 <= self.kappa_TC < 1.0:
            raise ConfigError("kappa_TC", InvalidUserDataError("Transaction-cost rate must lie in [0, 1), got {}"
                                                               .format(self.kappa_TC)))
        if not 0.0 < self.xi < 1.0:
            raise ConfigError("xi", InvalidUserDataError("Curvature exponent must lie in (0, 1), got {}"
                                                         .format(self.xi)))
        for key in ["delta_t", "T", "gamma"]:
            if not self.get(key) > 0:
                raise ConfigError(key, InvalidUserDataError("Value must be positive, got {}".format(self.get(key))))

    def get(self, key):
        for k, attr, _ in PARAMETER_FIELDS:
            if key == k or key == attr:
                return getattr(self, attr)
        raise KeyError(key)

    @property
    def rho(self):
        return tuple(getattr(self, k) for k in CORRELATION_FIELDS)

    def replace(self, **overrides):
        keys = dict((attr, key) for key, attr, _ in PARAMETER_FIELDS)
        rep = self.to_yml_rep()
        rep.update((keys.get(name, name), value) for name, value in overrides.items())
        return ModelParams(**rep)

    @classmethod
    def from_yml_rep(cls, yml_rep):
        if yml_rep is None:
            yml_rep = {}
        if not isinstance(yml_rep, dict):
            raise InvalidUserDataError("Model parameters must be a mapping")
        return cls(**yml_rep)

    def to_yml_rep(self):
        return dict((key, getattr(self, attr)) for key, attr, _ in PARAMETER_FIELDS)


class MarketState(EqualityMixin, StringRepresentationMixin):
    """A point (or, with array fields, a batch of points) of the state space. Array order is (W, v, theta, L, t)."""

    COORDINATES = ["W", "v", "theta", "L", "t"]

    def __init__(self, W, v, theta, L, t=0.0):
        self.W = W
        self.v = v
        self.theta = theta
        self.L = L
        self.t = t

    def validate(self, T=None):
        for name in ["W", "v", "theta", "L"]:
            if np.any(np.asarray(getattr(self, name)) < 0):
                raise DomainViolationError("State coordinate {} must be nonnegative".format(name))
        if T is not None and np.any((np.asarray(self.t) < 0) | (np.asarray(self.t) > T)):
            raise DomainViolationError("Time must lie in [0, {}]".format(T))
        return self

    def to_array(self):
        arrays = np.broadcast_arrays(*[np.asarray(getattr(self, name), dtype=float) for name in self.COORDINATES])
        return np.stack(arrays, axis=-1)

    @classmethod
    def from_array(cls, x):
        x = np.asarray(x, dtype=float)
        return cls(x[..., 0], x[..., 1], x[..., 2], x[..., 3], x[..., 4])

    def replace(self, **overrides):
        values = dict((name, getattr(self, name)) for name in self.COORDINATES)
        values.update(overrides)
        return MarketState(**values)

    @classmethod
    def from_yml_rep(cls, yml_rep):
        try:
            return cls(**dict((name, _parse_number(name, yml_rep[name])) for name in cls.COORDINATES
                              if name in yml_rep))
        except TypeError:
            raise InvalidUserDataError("A state needs W, v, theta and L")

    def to_yml_rep(self):
        return dict((name, float(getattr(self, name))) for name in self.COORDINATES)
