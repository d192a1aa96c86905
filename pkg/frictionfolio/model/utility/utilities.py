import numpy as np

from frictionfolio.exceptions.common.exceptions import DomainViolationError, InvalidUserDataError, \
    InvalidArgumentError, MissingUserDataError, ConfigError
from frictionfolio.util.common.helper import get_from_user_dict
from frictionfolio.util.common.type import EqualityMixin, StringRepresentationMixin


class UtilitySpec(EqualityMixin, StringRepresentationMixin):
    """Base class of all utility variants.

    Subclasses set ``VARIANT``, ``PARAMETERS`` (constructor argument names, in parameter-vector order) and
    ``POSITIVE`` (parameters calibrated on a log scale), and implement ``_evaluate``, ``_marginal`` and
    ``_second``. ``START`` holds calibration starting values for wealth of order 1 and ``START_SCALING`` the
    power of the wealth scale each of them carries."""

    VARIANT = None
    PARAMETERS = []
    POSITIVE = []
    START = {}
    START_SCALING = {}
    # log-type variants are undefined at W = 0
    OPEN_AT_ZERO = False

    def _check(self, W):
        W = np.asarray(W, dtype=float)
        if self.OPEN_AT_ZERO:
            if np.any(W <= 0):
                raise DomainViolationError("{} utility is only defined for W > 0".format(self.VARIANT))
        elif np.any(W < 0):
            raise DomainViolationError("Utility is only defined for W >= 0")
        return W

    def evaluate(self, W):
        return self._evaluate(self._check(W))

    def marginal(self, W):
        return self._marginal(self._check(W))

    def second_derivative(self, W):
        return self._second(self._check(W))

    def rra(self, W):
        W = self._check(W)
        if np.any(W <= 0):
            raise DomainViolationError("Relative risk aversion needs W > 0")
        return -self._second(W) / self._marginal(W) * W

    # Parameter vectors for calibration

    def parameters(self):
        return np.array([getattr(self, name) for name in self.PARAMETERS], dtype=float)

    def with_parameters(self, vec):
        return self.__class__(**dict(zip(self.PARAMETERS, [float(x) for x in vec])))

    def to_unconstrained(self):
        return np.array([np.log(getattr(self, name)) if name in self.POSITIVE else getattr(self, name)
                         for name in self.PARAMETERS], dtype=float)

    def from_unconstrained(self, z):
        values = [np.exp(x) if name in self.POSITIVE else x for name, x in zip(self.PARAMETERS, z)]
        return self.with_parameters(values)

    def to_yml_rep(self):
        rep = {"variant": self.VARIANT}
        for name in self.PARAMETERS:
            rep[name] = float(getattr(self, name))
        return rep

    @classmethod
    def from_yml_rep(cls, yml_rep):
        kwargs = {}
        for name in cls.PARAMETERS:
            try:
                kwargs[name] = get_from_user_dict(yml_rep, name, float)
            except InvalidUserDataError as e:
                raise ConfigError(name, e)
        return cls(**kwargs)

    def __call__(self, W):
        return self.evaluate(W)


def _require(condition, field, message):
    if not condition:
        raise ConfigError(field, InvalidUserDataError(message))


class LinearUtility(UtilitySpec):
    """U(W) = W, the risk-neutral investor."""
    VARIANT = "linear"

    def _evaluate(self, W):
        return W.copy()

    def _marginal(self, W):
        return np.ones_like(W)

    def _second(self, W):
        return np.zeros_like(W)


class PowerUtility(UtilitySpec):
    """U(W) = W**(1-k) / (1-k)."""
    VARIANT = "power"
    PARAMETERS = ["k"]
    POSITIVE = ["k"]
    OPEN_AT_ZERO = True
    START = {"k": 0.5}

    def __init__(self, k):
        _require(k > 0, "k", "Power utility needs k > 0")
        _require(k != 1, "k", "Power utility needs k != 1")
        self.k = float(k)

    def _evaluate(self, W):
        return W ** (1.0 - self.k) / (1.0 - self.k)

    def _marginal(self, W):
        return W ** (-self.k)

    def _second(self, W):
        return -self.k * W ** (-self.k - 1.0)


class ExponentialUtility(UtilitySpec):
    """U(W) = -exp(-k*W) / k."""
    VARIANT = "exponential"
    PARAMETERS = ["k"]
    POSITIVE = ["k"]
    START = {"k": 0.5}
    START_SCALING = {"k": -1}

    def __init__(self, k):
        _require(k > 0, "k", "Exponential utility needs k > 0")
        self.k = float(k)

    def _evaluate(self, W):
        return -np.exp(-self.k * W) / self.k

    def _marginal(self, W):
        return np.exp(-self.k * W)

    def _second(self, W):
        return -self.k * np.exp(-self.k * W)


class HaraUtility(UtilitySpec):
    """U(W) = (k1*W + k2)**(1 - 1/k1) / (k1 - 1)."""
    VARIANT = "hara"
    PARAMETERS = ["k1", "k2"]
    POSITIVE = ["k1", "k2"]
    START = {"k1": 2.0, "k2": 1.0}
    START_SCALING = {"k2": 1}

    def __init__(self, k1, k2):
        _require(k1 > 0, "k1", "HARA utility needs k1 > 0")
        _require(k1 != 1, "k1", "HARA utility needs k1 != 1")
        _require(k2 > 0, "k2", "HARA utility needs k2 > 0")
        self.k1 = float(k1)
        self.k2 = float(k2)

    def _evaluate(self, W):
        return (self.k1 * W + self.k2) ** (1.0 - 1.0 / self.k1) / (self.k1 - 1.0)

    def _marginal(self, W):
        return (self.k1 * W + self.k2) ** (-1.0 / self.k1)

    def _second(self, W):
        return -(self.k1 * W + self.k2) ** (-1.0 / self.k1 - 1.0)


class LogPlusPowerUtility(UtilitySpec):
    """U(W) = k1*log(W) + W**k2 / k2."""
    VARIANT = "log_plus_power"
    PARAMETERS = ["k1", "k2"]
    POSITIVE = ["k1", "k2"]
    OPEN_AT_ZERO = True
    START = {"k1": 1.0, "k2": 0.5}

    def __init__(self, k1, k2):
        _require(k1 > 0, "k1", "Log-plus-power utility needs k1 > 0")
        _require(k2 > 0, "k2", "Log-plus-power utility needs k2 > 0")
        self.k1 = float(k1)
        self.k2 = float(k2)

    def _evaluate(self, W):
        return self.k1 * np.log(W) + W ** self.k2 / self.k2

    def _marginal(self, W):
        return self.k1 / W + W ** (self.k2 - 1.0)

    def _second(self, W):
        return -self.k1 / W ** 2 + (self.k2 - 1.0) * W ** (self.k2 - 2.0)


class LinearPlusExponentialUtility(UtilitySpec):
    """U(W) = k1*W - exp(-k2*W) / k2."""
    VARIANT = "linear_plus_exponential"
    PARAMETERS = ["k1", "k2"]
    POSITIVE = ["k1", "k2"]
    START = {"k1": 1.0, "k2": 0.5}
    START_SCALING = {"k2": -1}

    def __init__(self, k1, k2):
        _require(k1 > 0, "k1", "Linear-plus-exponential utility needs k1 > 0")
        _require(k2 > 0, "k2", "Linear-plus-exponential utility needs k2 > 0")
        self.k1 = float(k1)
        self.k2 = float(k2)

    def _evaluate(self, W):
        return self.k1 * W - np.exp(-self.k2 * W) / self.k2

    def _marginal(self, W):
        return self.k1 + np.exp(-self.k2 * W)

    def _second(self, W):
        return -self.k2 * np.exp(-self.k2 * W)


class SShapedUtility(UtilitySpec):
    """tanh(k1*(W - W0)) above the reference point W0, -(k1/k2)*tanh(k2*(W0 - W)) below it.

    Concave in gains, convex in losses, and C1 at W0 where both branches have slope k1."""
    VARIANT = "s_shaped"
    PARAMETERS = ["k1", "k2", "W0"]
    POSITIVE = ["k1", "k2", "W0"]
    START = {"k1": 2.0, "k2": 2.0, "W0": 1.0}
    START_SCALING = {"k1": -1, "k2": -1, "W0": 1}

    def __init__(self, k1, k2, W0):
        _require(k1 > 0, "k1", "S-shaped utility needs k1 > 0")
        _require(k2 > 0, "k2", "S-shaped utility needs k2 > 0")
        _require(W0 > 0, "W0", "S-shaped utility needs W0 > 0")
        self.k1 = float(k1)
        self.k2 = float(k2)
        self.W0 = float(W0)

    def gain(self, W):
        return np.tanh(self.k1 * (W - self.W0))

    def _evaluate(self, W):
        gain = np.tanh(self.k1 * (W - self.W0))
        loss = -(self.k1 / self.k2) * np.tanh(self.k2 * (self.W0 - W))
        return np.where(W >= self.W0, gain, loss)

    def _marginal(self, W):
        t_gain = np.tanh(self.k1 * (W - self.W0))
        t_loss = np.tanh(self.k2 * (self.W0 - W))
        return np.where(W >= self.W0, self.k1 * (1.0 - t_gain ** 2), self.k1 * (1.0 - t_loss ** 2))

    def _second(self, W):
        t_gain = np.tanh(self.k1 * (W - self.W0))
        t_loss = np.tanh(self.k2 * (self.W0 - W))
        return np.where(W >= self.W0,
                        -2.0 * self.k1 ** 2 * t_gain * (1.0 - t_gain ** 2),
                        2.0 * self.k1 * self.k2 * t_loss * (1.0 - t_loss ** 2))


CALIBRATION_FAMILIES = [LinearUtility, PowerUtility, ExponentialUtility, HaraUtility, LogPlusPowerUtility,
                        LinearPlusExponentialUtility, SShapedUtility]


def starting_utility(cls, scale=1.0):
    """Calibration starting point of family ``cls`` for wealth around ``scale``."""
    if not cls.PARAMETERS:
        return cls()
    if not np.isfinite(scale) or scale <= 0:
        raise InvalidArgumentError("Starting scale must be positive and finite, got {}".format(scale))
    return cls(**dict((name, value * scale ** cls.START_SCALING.get(name, 0)) for name, value in cls.START.items()))


def variant_class(name):
    from frictionfolio.model.utility.envelope import ConcaveEnvelope

    for cls in CALIBRATION_FAMILIES + [ConcaveEnvelope]:
        if cls.VARIANT == name:
            return cls
    raise InvalidUserDataError("Unknown utility variant \"{}\". Valid variants are: {}".format(
        name, ", ".join(c.VARIANT for c in CALIBRATION_FAMILIES + [ConcaveEnvelope])))


def utility_from_yml_rep(yml_rep):
    try:
        variant = get_from_user_dict(yml_rep, "variant", str)
    except MissingUserDataError as e:
        raise ConfigError("variant", e)
    return variant_class(variant).from_yml_rep(yml_rep)
