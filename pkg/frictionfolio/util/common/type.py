import numpy as np


def _values_equal(a, b):
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(np.asarray(a), np.asarray(b))
    if isinstance(a, (list, tuple)) and isinstance(b, (list, tuple)):
        return len(a) == len(b) and all(_values_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(_values_equal(a[k], b[k]) for k in a)
    return a == b


class EqualityMixin(object):
    def __eq__(self, other):
        return (isinstance(other, self.__class__)
                and _values_equal(self.__dict__, other.__dict__))

    def __ne__(self, other):
        return not self.__eq__(other)

    __hash__ = None


class StringRepresentationMixin(object):
    def __repr__(self):
        return "<{}({})>".format(
            self.__class__.__name__,
            ', '.join(["{}={}".format(k, repr(self.__dict__[k])) for k in self.__dict__ if k[0] != '_'])
        )

    __str__ = __repr__


class GenericEnum(object):
    """A closed set of lowercase string constants, e.g. ``OptimizerMethod.LBFGS == "lbfgs"``.

    Members are looked up case-insensitively with dashes and underscores treated alike, so YAML values such as
    ``strong-wolfe`` and ``STRONG_WOLFE`` both resolve to the same member."""

    @staticmethod
    def create(name, values):
        return type("{}_GenericEnum".format(name),
                    (GenericEnum,),
                    dict((_attribute_name(x), str(x).lower()) for x in values))

    @classmethod
    def is_valid(cls, val):
        return val in cls.values()

    @classmethod
    def fromstring(cls, s):
        value = getattr(cls, _attribute_name(s), None)
        if value is None:
            from frictionfolio.exceptions.common.exceptions import InvalidArgumentError

            raise InvalidArgumentError("Could not convert string[%s] to class[%s] because the value was "
                                       "undefined"
                                       % (s, cls.__name__))
        return value

    @classmethod
    def values(cls):
        return sorted(v for k, v in vars(cls).items() if not k.startswith("_") and isinstance(v, str))


def _attribute_name(x):
    return str(x).upper().replace("-", "_")
