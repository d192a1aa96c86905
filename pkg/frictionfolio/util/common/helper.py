import numbers

from frictionfolio.exceptions.common.exceptions import MissingUserDataError, InvalidUserDataError, \
    InvalidArgumentError


def getitem_with_default(d, key, default_value):
    try:
        return d[key]
    except (KeyError, TypeError):
        return default_value


def get_from_user_dict(yml_rep, key, object_type, default=MissingUserDataError):
    try:
        value = yml_rep[key]
    except (KeyError, TypeError):
        if default is MissingUserDataError:
            raise MissingUserDataError("Attribute \"%s\" was not provided" % key)
        return default

    # YAML reads "1" as an int where a float was meant
    if object_type is float and isinstance(value, numbers.Real) and not isinstance(value, bool):
        return float(value)
    if not isinstance(value, object_type) or (object_type is int and isinstance(value, bool)):
        raise InvalidUserDataError("Attribute \"%s\" was not of type %s" % (key, object_type.__name__))

    return value


def get_enum_from_user_dict(yml_rep, key, enum_class, default=MissingUserDataError):
    try:
        value = yml_rep[key]
    except (KeyError, TypeError):
        if default is MissingUserDataError:
            raise MissingUserDataError("Attribute \"%s\" was not provided" % key)
        return default

    if not isinstance(value, str):
        raise InvalidUserDataError("Attribute \"%s\" was not a string" % key)

    try:
        return enum_class.fromstring(value)
    except InvalidArgumentError:
        raise InvalidUserDataError("Attribute \"%s\" had unknown value \"%s\". Valid values are: %s"
                                   % (key, value, ", ".join(enum_class.values())))
