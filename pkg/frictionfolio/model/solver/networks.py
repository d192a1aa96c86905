import numpy as np

from frictionfolio.exceptions.common.exceptions import InvalidArgumentError, ConfigError, InvalidUserDataError
from frictionfolio.model.market.params import MarketState
from frictionfolio.util.common.helper import get_from_user_dict
from frictionfolio.util.common.type import StringRepresentationMixin, EqualityMixin
from frictionfolio.util.numerics import hyperdual as hd
from frictionfolio.util.numerics.hyperdual import HyperDual

N_INPUTS = len(MarketState.COORDINATES)
DEFAULT_HIDDEN = 64
INIT_SCALE = 0.1


class Domain(EqualityMixin, StringRepresentationMixin):
    """The truncated state box ``W x v x theta x L x [0, T]``. A range of zero width freezes that coordinate."""

    RANGES = ["W", "v", "theta", "L"]
    DEFAULTS = {"W": (0.5, 12.0), "v": (0.01, 0.6), "theta": (0.01, 0.8), "L": (0.0, 1.0)}

    def __init__(self, W=None, v=None, theta=None, L=None, T=1.0):
        given = {"W": W, "v": v, "theta": theta, "L": L}
        for name in self.RANGES:
            rng = self.DEFAULTS[name] if given[name] is None else given[name]
            setattr(self, name, tuple(float(x) for x in rng))
        self.T = float(T)
        self.validate()

    def validate(self):
        for name in self.RANGES:
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise ConfigError(name, InvalidUserDataError("Range [{}, {}] is empty".format(lo, hi)))
        if not self.T > 0:
            raise ConfigError("T", InvalidUserDataError("Horizon must be positive"))
        if self.W[0] < 0 or self.v[0] < 0 or self.theta[0] < 0:
            raise ConfigError("domain", InvalidUserDataError("W, v and theta ranges must be nonnegative"))

    def bounds(self):
        """``(lower, upper)`` arrays in state coordinate order."""
        ranges = [getattr(self, name) for name in self.RANGES] + [(0.0, self.T)]
        return np.array([r[0] for r in ranges]), np.array([r[1] for r in ranges])

    def frozen(self):
        lower, upper = self.bounds()
        return lower == upper

    def standardization(self):
        """Centre and scale mapping each live coordinate onto [-1, 1]; frozen coordinates pass through."""
        lower, upper = self.bounds()
        frozen = lower == upper
        center = np.where(frozen, 0.0, 0.5 * (lower + upper))
        scale = np.where(frozen, 1.0, 0.5 * (upper - lower))
        return center, scale

    def contains(self, x, tol=1e-12):
        lower, upper = self.bounds()
        x = np.asarray(x, dtype=float)
        return np.all((x >= lower - tol) & (x <= upper + tol), axis=-1)

    def replace(self, **overrides):
        rep = self.to_yml_rep()
        rep.update(overrides)
        return Domain.from_yml_rep(rep)

    @classmethod
    def from_yml_rep(cls, yml_rep):
        kwargs = {}
        for name in cls.RANGES:
            rng = get_from_user_dict(yml_rep, name, list, list(cls.DEFAULTS[name]))
            if len(rng) != 2:
                raise ConfigError(name, InvalidUserDataError("A range needs exactly two values"))
            kwargs[name] = rng
        kwargs["T"] = get_from_user_dict(yml_rep, "T", float, 1.0)
        return cls(**kwargs)

    def to_yml_rep(self):
        rep = dict((name, list(getattr(self, name))) for name in self.RANGES)
        rep["T"] = self.T
        return rep


def layer_shapes(hidden):
    return [(N_INPUTS, hidden), (hidden,), (hidden, hidden), (hidden,), (hidden, 1), (1,)]


def n_parameters(hidden):
    return sum(int(np.prod(s)) for s in layer_shapes(hidden))


def unpack(theta, hidden):
    """Splits a flat parameter vector (array or tape variable) into layer weights and biases."""
    layers = []
    offset = 0
    for shape in layer_shapes(hidden):
        size = int(np.prod(shape))
        layers.append(theta[offset:offset + size].reshape(*shape))
        offset += size
    return layers


def init_parameters(hidden, rng, scale=INIT_SCALE):
    return rng.uniform(-scale, scale, size=n_parameters(hidden))


def _state_size(x):
    value = x.value if isinstance(x, HyperDual) else np.asarray(x)
    return np.shape(value)[-1] if np.ndim(value) else 0


def mlp(theta, x, hidden, center, scale):
    """f3(tanh(f2(tanh(f1(standardized x))))). ``x`` may be a plain array or a :class:`HyperDual`."""
    if _state_size(x) != N_INPUTS:
        raise InvalidArgumentError("Networks take {}-dimensional states, got {}".format(N_INPUTS, _state_size(x)))
    w1, b1, w2, b2, w3, b3 = unpack(theta, hidden)
    z = (x - center) * (1.0 / scale)
    z = hd.tanh(z @ w1 + b1)
    z = hd.tanh(z @ w2 + b2)
    return (z @ w3 + b3)[..., 0]


class NetworkParams(StringRepresentationMixin):
    """Flat parameter vectors of the value and policy networks plus the input standardization they share."""

    def __init__(self, hidden, value, policy, center, scale):
        self.hidden = int(hidden)
        self.value = np.asarray(value, dtype=float)
        self.policy = np.asarray(policy, dtype=float)
        self.center = np.asarray(center, dtype=float)
        self.scale = np.asarray(scale, dtype=float)
        expected = n_parameters(self.hidden)
        if self.value.size != expected or self.policy.size != expected:
            raise InvalidArgumentError("Networks with {} hidden units need {} parameters each, got {} and {}"
                                       .format(self.hidden, expected, self.value.size, self.policy.size))

    @classmethod
    def initial(cls, domain, hidden, rng, scale=INIT_SCALE):
        center, std = domain.standardization()
        return cls(hidden, init_parameters(hidden, rng, scale), init_parameters(hidden, rng, scale), center, std)

    def replace(self, value=None, policy=None):
        return NetworkParams(self.hidden, self.value if value is None else value,
                             self.policy if policy is None else policy, self.center, self.scale)

    def to_json_rep(self):
        return {"hidden": self.hidden,
                "layer_shapes": [list(s) for s in layer_shapes(self.hidden)],
                "value": self.value.tolist(),
                "policy": self.policy.tolist(),
                "center": self.center.tolist(),
                "scale": self.scale.tolist()}

    @classmethod
    def from_json_rep(cls, rep):
        return cls(rep["hidden"], rep["value"], rep["policy"], rep["center"], rep["scale"])


def value_net(params, x, theta=None):
    """Q(x). ``theta`` overrides the stored value parameters, e.g. with a tape variable."""
    return mlp(params.value if theta is None else theta, x, params.hidden, params.center, params.scale)


def policy_net(params, x, theta=None):
    """omega(x) in (0, 1)."""
    return hd.sigmoid(mlp(params.policy if theta is None else theta, x, params.hidden, params.center, params.scale))
