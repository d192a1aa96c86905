"""Hyper-dual numbers carrying exact first and second derivatives with respect to a handful of input directions.

A :class:`HyperDual` holds a value, one first-derivative component per active direction and the upper triangle of
the second-derivative matrix. Components may be floats, numpy arrays or tape :class:`~frictionfolio.util.numerics.
tape.Variable` objects, so the same propagation also carries parameter gradients when a network's weights live on a
tape. A component that is structurally zero is stored as the literal ``0.0`` and skipped by the arithmetic."""

import numbers

import numpy as np

from frictionfolio.exceptions.common.exceptions import InvalidArgumentError
from frictionfolio.exceptions.model.exceptions import UnsupportedPrimitiveError, NonFiniteValueError
from frictionfolio.util.numerics import tape as tp

ZERO = 0.0


def _is_zero(x):
    return isinstance(x, numbers.Number) and x == 0


def _mul(a, b):
    if _is_zero(a) or _is_zero(b):
        return ZERO
    return a * b


def _add(a, b):
    if _is_zero(a):
        return b
    if _is_zero(b):
        return a
    return a + b


def _neg(a):
    if _is_zero(a):
        return ZERO
    return -a


def _matmul(a, m):
    if _is_zero(a):
        return ZERO
    return a @ m


def _index(a, key):
    if _is_zero(a):
        return ZERO
    if isinstance(a, numbers.Number):
        return a
    return a[key]


class HyperDual(object):
    __slots__ = ["value", "first", "second"]

    def __init__(self, value, first, second=None):
        self.value = value
        self.first = list(first)
        self.second = dict(second or {})

    @property
    def n_active(self):
        return len(self.first)

    @classmethod
    def constant(cls, value, n_active):
        return cls(value, [ZERO] * n_active)

    @classmethod
    def seed(cls, x, active):
        """Seeds a point ``x`` of shape ``(n,)`` or a batch of shape ``(m, n)`` so that direction ``k`` of the result
        differentiates with respect to input coordinate ``active[k]``. Coordinates are read back with
        ``x[..., i]``."""
        x = np.asarray(x, dtype=float)
        n = x.shape[-1]
        first = []
        for i in active:
            e = np.zeros(n)
            e[i] = 1.0
            first.append(e)
        return cls(x, first)

    def second_component(self, i, j):
        if i > j:
            i, j = j, i
        return self.second.get((i, j), ZERO)

    def _pairs(self):
        n = self.n_active
        return [(i, j) for i in range(n) for j in range(i, n)]

    def _coerce(self, other):
        if isinstance(other, HyperDual):
            if other.n_active != self.n_active:
                raise InvalidArgumentError("Hyper-dual operands have {} and {} active directions"
                                           .format(self.n_active, other.n_active))
            return other
        return None

    # Arithmetic

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return HyperDual(self.value + other, self.first, self.second)
        second = dict(self.second)
        for key, s in o.second.items():
            second[key] = _add(second.get(key, ZERO), s)
        return HyperDual(self.value + o.value, [_add(a, b) for a, b in zip(self.first, o.first)], second)

    def __radd__(self, other):
        return HyperDual(other + self.value, self.first, self.second)

    def __neg__(self):
        return HyperDual(-self.value, [_neg(a) for a in self.first],
                         dict((k, _neg(s)) for k, s in self.second.items()))

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, HyperDual):
            return self + (-other)
        return HyperDual(self.value - other, self.first, self.second)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return HyperDual(self.value * other,
                             [_mul(a, other) for a in self.first],
                             dict((k, _mul(s, other)) for k, s in self.second.items()))
        first = [_add(_mul(a, o.value), _mul(self.value, b)) for a, b in zip(self.first, o.first)]
        second = {}
        for (i, j) in self._pairs():
            s = _add(_mul(self.second.get((i, j), ZERO), o.value), _mul(self.value, o.second.get((i, j), ZERO)))
            s = _add(s, _mul(self.first[i], o.first[j]))
            s = _add(s, _mul(self.first[j], o.first[i]))
            if not _is_zero(s):
                second[(i, j)] = s
        return HyperDual(self.value * o.value, first, second)

    def __rmul__(self, other):
        return self.__mul__(other)

    def reciprocal(self):
        v = self.value
        inv = 1.0 / v
        return self._chain(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other):
        if isinstance(other, HyperDual):
            return self * other.reciprocal()
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, HyperDual):
            return (p * self.log()).exp()
        if not isinstance(p, numbers.Real):
            raise UnsupportedPrimitiveError("pow with array exponent")
        p = float(p)
        if p == 0.0:
            return HyperDual.constant(np.ones_like(tp.value_of(self.value)), self.n_active)
        v = self.value
        return self._chain(v ** p, p * v ** (p - 1.0), p * (p - 1.0) * v ** (p - 2.0) if p != 1.0 else ZERO)

    def __rpow__(self, base):
        return (self * float(np.log(base))).exp()

    def __matmul__(self, m):
        if isinstance(m, HyperDual):
            raise UnsupportedPrimitiveError("matmul of two hyper-dual operands")
        return HyperDual(self.value @ m, [_matmul(a, m) for a in self.first],
                         dict((k, _matmul(s, m)) for k, s in self.second.items()))

    def __getitem__(self, key):
        return HyperDual(_index(self.value, key), [_index(a, key) for a in self.first],
                         dict((k, _index(s, key)) for k, s in self.second.items()))

    # Elementary functions

    def _chain(self, f0, f1, f2):
        """Applies a scalar function with value ``f0``, derivative ``f1`` and second derivative ``f2`` at the value."""
        first = [_mul(f1, a) for a in self.first]
        second = {}
        for (i, j) in self._pairs():
            s = _add(_mul(f1, self.second.get((i, j), ZERO)), _mul(f2, _mul(self.first[i], self.first[j])))
            if not _is_zero(s):
                second[(i, j)] = s
        return HyperDual(f0, first, second)

    def exp(self):
        e = tp.exp(self.value)
        return self._chain(e, e, e)

    def log(self):
        v = self.value
        inv = 1.0 / v
        return self._chain(tp.log(v), inv, -inv * inv)

    def tanh(self):
        t = tp.tanh(self.value)
        d = 1.0 - t * t
        return self._chain(t, d, -2.0 * t * d)

    def sqrt(self):
        s = tp.sqrt(self.value)
        d = 0.5 / s
        return self._chain(s, d, -0.5 * d / self.value)

    def sigmoid(self):
        s = tp.sigmoid(self.value)
        d = s * (1.0 - s)
        return self._chain(s, d, d * (1.0 - 2.0 * s))

    def square(self):
        return self * self

    # numpy interoperability

    _UNARY = {
        "exp": "exp",
        "log": "log",
        "tanh": "tanh",
        "sqrt": "sqrt",
        "expit": "sigmoid",
        "negative": "__neg__",
        "square": "square",
        "reciprocal": "reciprocal",
    }

    _BINARY = {
        "add": ("__add__", "__radd__"),
        "subtract": ("__sub__", "__rsub__"),
        "multiply": ("__mul__", "__rmul__"),
        "true_divide": ("__truediv__", "__rtruediv__"),
        "divide": ("__truediv__", "__rtruediv__"),
        "power": ("__pow__", "__rpow__"),
        "matmul": ("__matmul__", None),
    }

    def __array_ufunc__(self, ufunc, method, *inputs, **kwargs):
        name = ufunc.__name__
        if method != "__call__" or kwargs:
            raise UnsupportedPrimitiveError("{}.{}".format(name, method))
        if name in self._UNARY and len(inputs) == 1:
            return getattr(inputs[0], self._UNARY[name])()
        if name in self._BINARY and len(inputs) == 2:
            direct, reflected = self._BINARY[name]
            if isinstance(inputs[0], HyperDual):
                return getattr(inputs[0], direct)(inputs[1])
            if reflected is None:
                raise UnsupportedPrimitiveError(name)
            return getattr(inputs[1], reflected)(inputs[0])
        raise UnsupportedPrimitiveError(name)

    def __float__(self):
        raise UnsupportedPrimitiveError("float conversion")

    def __bool__(self):
        raise UnsupportedPrimitiveError("truth value")

    def __repr__(self):
        return "<HyperDual(value={}, n_active={})>".format(self.value, self.n_active)


def exp(x):
    return x.exp() if isinstance(x, HyperDual) else tp.exp(x)


def log(x):
    return x.log() if isinstance(x, HyperDual) else tp.log(x)


def tanh(x):
    return x.tanh() if isinstance(x, HyperDual) else tp.tanh(x)


def sqrt(x):
    return x.sqrt() if isinstance(x, HyperDual) else tp.sqrt(x)


def sigmoid(x):
    return x.sigmoid() if isinstance(x, HyperDual) else tp.sigmoid(x)


class InputDerivatives(object):
    """Value, gradient and Hessian of a function over its active input directions, for one point or a batch."""

    def __init__(self, value, gradient, hessian, active):
        self.value = value
        self.gradient = gradient
        self.hessian = hessian
        self.active = list(active)

    def __iter__(self):
        return iter((self.value, self.gradient, self.hessian))


def _component_array(c, shape):
    return np.broadcast_to(np.asarray(tp.value_of(c), dtype=float), shape)


def eval_with_input_derivs(f, x, active):
    """Evaluates ``f`` at ``x`` and returns exact first and second derivatives over the ``active`` input coordinates.

    ``x`` is a point of shape ``(n,)`` or a batch of shape ``(m, n)``; ``f`` receives a :class:`HyperDual` and reads
    coordinate ``i`` as ``x[..., i]``. For a batch the gradient has shape ``(m, k)`` and the Hessian ``(m, k, k)``.
    """
    x = np.asarray(x, dtype=float)
    active = list(active)
    if not active:
        raise InvalidArgumentError("At least one active direction is required")
    if x.ndim not in (1, 2):
        raise InvalidArgumentError("Expected a point or a batch of points, got shape {}".format(x.shape))
    n = x.shape[-1]
    for i in active:
        if not 0 <= i < n:
            raise InvalidArgumentError("Active direction {} is outside the {} inputs".format(i, n))

    out = f(HyperDual.seed(x, active))
    k = len(active)
    shape = x.shape[:-1]
    if not isinstance(out, HyperDual):
        out = HyperDual.constant(out, k)

    value = _component_array(out.value, shape).copy()
    gradient = np.zeros(shape + (k,))
    hessian = np.zeros(shape + (k, k))
    for i in range(k):
        gradient[..., i] = _component_array(out.first[i], shape)
        for j in range(i, k):
            s = _component_array(out.second_component(i, j), shape)
            hessian[..., i, j] = s
            hessian[..., j, i] = s

    if not (np.all(np.isfinite(value)) and np.all(np.isfinite(gradient)) and np.all(np.isfinite(hessian))):
        raise NonFiniteValueError("Derivative evaluation produced non-finite values")
    return InputDerivatives(value, gradient, hessian, active)
