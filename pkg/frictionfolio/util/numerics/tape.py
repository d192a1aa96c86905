import numbers

import numpy as np
from scipy.special import expit

from frictionfolio.exceptions.common.exceptions import InvalidArgumentError
from frictionfolio.exceptions.model.exceptions import NonFiniteValueError


class _Node(object):
    __slots__ = ["name", "forward", "inputs", "backward", "output"]

    def __init__(self, name, forward, inputs, backward):
        self.name = name
        self.forward = forward
        self.inputs = inputs
        self.backward = backward
        self.output = None


def _value(x):
    if isinstance(x, Variable):
        return x.value
    return x


def _unbroadcast(g, shape):
    g = np.asarray(g, dtype=float)
    if g.shape == shape:
        return g
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, n in enumerate(shape):
        if n == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g.reshape(shape)


class Tape(object):
    """A Wengert list of elementary array operations.

    Leaves are created with :meth:`variable`; every arithmetic operation on a :class:`Variable` appends a node
    holding its forward function and its vector-Jacobian product. :meth:`gradient` walks the list backwards,
    :meth:`replay` re-runs it forwards from the leaf values."""

    def __init__(self):
        self._nodes = []

    def __len__(self):
        return len(self._nodes)

    def variable(self, value):
        value = np.array(value, dtype=float)
        return self._push(_Node("leaf", None, (), None), value)

    def _push(self, node, value):
        var = Variable(value, self, len(self._nodes))
        node.output = var
        self._nodes.append(node)
        return var

    def record(self, name, forward, inputs, backward):
        out = np.asarray(forward(*[_value(x) for x in inputs]), dtype=float)
        return self._push(_Node(name, forward, tuple(inputs), backward), out)

    def gradient(self, output, wrt):
        if not isinstance(output, Variable) or output.tape is not self:
            raise InvalidArgumentError("Gradient target was not recorded on this tape")
        if output.value.size != 1:
            raise InvalidArgumentError("Gradient target must be a scalar, got shape {}".format(output.value.shape))

        adjoints = [None] * (output.index + 1)
        adjoints[output.index] = np.ones_like(output.value)
        for k in range(output.index, -1, -1):
            node = self._nodes[k]
            g = adjoints[k]
            if g is None or node.backward is None:
                continue
            input_values = [_value(x) for x in node.inputs]
            input_grads = node.backward(g, input_values, node.output.value)
            for x, gx in zip(node.inputs, input_grads):
                if gx is None or not isinstance(x, Variable):
                    continue
                gx = _unbroadcast(gx, x.value.shape)
                adjoints[x.index] = gx if adjoints[x.index] is None else adjoints[x.index] + gx

        return [adjoints[w.index] if w.index < len(adjoints) and adjoints[w.index] is not None
                else np.zeros_like(w.value)
                for w in wrt]

    def replay(self, output=None):
        """Re-executes the recorded operations from the leaf values and returns the value of ``output`` (the last
        recorded node by default)."""
        stop = len(self._nodes) if output is None else output.index + 1
        values = [None] * stop
        for k in range(stop):
            node = self._nodes[k]
            if node.forward is None:
                values[k] = node.output.value
            else:
                values[k] = node.forward(*[values[x.index] if isinstance(x, Variable) else x
                                           for x in node.inputs])
        return values[stop - 1]


class Variable(object):
    __slots__ = ["value", "tape", "index"]

    # numpy defers every binary operator with a Variable operand to the Variable's reflected method
    __array_ufunc__ = None

    def __init__(self, value, tape, index):
        self.value = value
        self.tape = tape
        self.index = index

    @property
    def shape(self):
        return self.value.shape

    @property
    def ndim(self):
        return self.value.ndim

    @property
    def size(self):
        return self.value.size

    def __float__(self):
        return float(self.value)

    def __len__(self):
        return len(self.value)

    def __repr__(self):
        return "<Variable(index={}, shape={})>".format(self.index, self.value.shape)

    def _binary(self, name, other, forward, backward, reflected=False):
        if not isinstance(other, (Variable, np.ndarray, numbers.Number)):
            return NotImplemented
        inputs = (other, self) if reflected else (self, other)
        return self.tape.record(name, forward, inputs, backward)

    def __add__(self, other):
        return self._binary("add", other, np.add, lambda g, v, out: (g, g))

    def __radd__(self, other):
        return self._binary("add", other, np.add, lambda g, v, out: (g, g), reflected=True)

    def __sub__(self, other):
        return self._binary("sub", other, np.subtract, lambda g, v, out: (g, -g))

    def __rsub__(self, other):
        return self._binary("sub", other, np.subtract, lambda g, v, out: (g, -g), reflected=True)

    def __mul__(self, other):
        return self._binary("mul", other, np.multiply, lambda g, v, out: (g * v[1], g * v[0]))

    def __rmul__(self, other):
        return self._binary("mul", other, np.multiply, lambda g, v, out: (g * v[1], g * v[0]), reflected=True)

    def __truediv__(self, other):
        return self._binary("div", other, np.divide, _div_backward)

    def __rtruediv__(self, other):
        return self._binary("div", other, np.divide, _div_backward, reflected=True)

    def __neg__(self):
        return self.tape.record("neg", np.negative, (self,), lambda g, v, out: (-g,))

    def __pos__(self):
        return self

    def __pow__(self, p):
        if not isinstance(p, numbers.Real):
            raise InvalidArgumentError("Only constant real exponents are supported on tape variables")
        p = float(p)
        if p == 2.0:
            return self.tape.record("square", np.square, (self,), lambda g, v, out: (2.0 * g * v[0],))
        return self.tape.record("pow", lambda a: np.power(a, p), (self,),
                                lambda g, v, out: (g * p * np.power(v[0], p - 1.0),))

    def __matmul__(self, other):
        return self._binary("matmul", other, np.matmul, _matmul_backward)

    def __rmatmul__(self, other):
        return self._binary("matmul", other, np.matmul, _matmul_backward, reflected=True)

    def __getitem__(self, key):
        def backward(g, v, out):
            z = np.zeros_like(v[0])
            if _is_basic_index(key):
                z[key] += g
            else:
                np.add.at(z, key, g)
            return (z,)

        return self.tape.record("getitem", lambda a: a[key], (self,), backward)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return self.tape.record("reshape", lambda a: np.reshape(a, shape), (self,),
                                lambda g, v, out: (np.reshape(g, v[0].shape),))

    @property
    def T(self):
        return self.tape.record("transpose", np.transpose, (self,), lambda g, v, out: (np.transpose(g),))

    def sum(self, axis=None):
        def backward(g, v, out):
            if axis is not None:
                g = np.expand_dims(g, axis)
            return (np.broadcast_to(g, v[0].shape).copy(),)

        return self.tape.record("sum", lambda a: np.sum(a, axis=axis), (self,), backward)

    def mean(self, axis=None):
        n = self.value.size if axis is None else self.value.shape[axis]
        return self.sum(axis=axis) * (1.0 / n)


def _div_backward(g, v, out):
    a, b = v
    return g / b, -g * a / (b * b)


def _matmul_backward(g, v, out):
    a, b = v
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim == 1:
        return g @ b.T, np.outer(a, g)
    if b.ndim == 1:
        return np.outer(g, b), a.T @ g
    return g @ b.T, a.T @ g


def _unary(x, name, forward, backward):
    if isinstance(x, Variable):
        return x.tape.record(name, forward, (x,), backward)
    return forward(x)


def tanh(x):
    return _unary(x, "tanh", np.tanh, lambda g, v, out: (g * (1.0 - out * out),))


def exp(x):
    return _unary(x, "exp", np.exp, lambda g, v, out: (g * out,))


def log(x):
    return _unary(x, "log", np.log, lambda g, v, out: (g / v[0],))


def sqrt(x):
    return _unary(x, "sqrt", np.sqrt, lambda g, v, out: (0.5 * g / out,))


def sigmoid(x):
    return _unary(x, "sigmoid", expit, lambda g, v, out: (g * out * (1.0 - out),))


def square(x):
    if isinstance(x, Variable):
        return x ** 2
    return np.square(x)


def total(x, axis=None):
    if isinstance(x, Variable):
        return x.sum(axis=axis)
    return np.sum(x, axis=axis)


def average(x, axis=None):
    if isinstance(x, Variable):
        return x.mean(axis=axis)
    return np.mean(x, axis=axis)


def value_of(x):
    if isinstance(x, Variable):
        return x.value
    return np.asarray(x)


def value_and_grad(loss, theta):
    """Evaluates ``loss`` at the parameter vector ``theta`` on a fresh tape and returns ``(value, gradient)``."""
    tape = Tape()
    var = tape.variable(theta)
    out = loss(var)
    if not isinstance(out, Variable):
        value = float(np.asarray(out))
        if not np.isfinite(value):
            raise NonFiniteValueError("Loss is not finite: {}".format(value))
        return value, np.zeros_like(var.value)
    value = float(out.value)
    if not np.isfinite(value):
        raise NonFiniteValueError("Loss is not finite: {}".format(value))
    grad, = tape.gradient(out, [var])
    return value, grad


def grad_wrt_params(loss, theta):
    return value_and_grad(loss, theta)[1]


def _is_basic_index(key):
    parts = key if isinstance(key, tuple) else (key,)
    return all(p is None or p is Ellipsis or isinstance(p, (numbers.Integral, slice)) for p in parts)
