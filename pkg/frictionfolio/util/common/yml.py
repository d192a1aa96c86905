import logging
import os
import traceback

import yaml
from yaml.scanner import ScannerError
from yaml.parser import ParserError

from frictionfolio.exceptions.common.exceptions import FrictionfolioUnexpectedError, InvalidYmlFileError


log = logging.getLogger(__name__)

try:
    _Loader = yaml.CSafeLoader
except AttributeError:  # PyYAML built without libyaml
    _Loader = yaml.SafeLoader


def yml_load(f):
    try:
        return yaml.load(f, Loader=_Loader)
    except (ScannerError, ParserError) as se:
        mark = se.problem_mark
        raise InvalidYmlFileError(
            "File {} is not syntactically valid YML. Error on line {}, column {} of the YML file: {}".format(
                os.path.basename(mark.name),
                mark.line + 1,
                mark.column + 1,
                se.problem))
    except:
        raise FrictionfolioUnexpectedError(traceback.format_exc())


def yml_load_file(path):
    with open(path, "r", encoding="utf-8") as f:
        return yml_load(f)


def parse_yml_scalar(s):
    """Reads the right-hand side of a ``--set key=value`` override with YAML typing rules, so ``0.3`` becomes a float,
    ``[0.1, 0.2]`` a list and ``lbfgs`` a string."""
    value = yml_load(s)
    return "" if value is None else value


def merge_yml_reps(base, overrides):
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_yml_reps(merged[key], value)
        else:
            merged[key] = value
    return merged


def set_dotted(yml_rep, dotted_key, value):
    parts = dotted_key.split(".")
    node = yml_rep
    for part in parts[:-1]:
        if not isinstance(node.get(part), dict):
            node[part] = {}
        node = node[part]
    node[parts[-1]] = value
    return yml_rep
