import io

import pandas as pd

FLOAT_FORMAT = "%.10g"


def provenance_header(config_hash, seed):
    return "# config_hash={}, seed={}\n".format(config_hash, seed)


def write_table(frame, f, config_hash, seed):
    """Writes a frame as CSV preceded by a provenance comment line. ``f`` is an open text file."""
    f.write(provenance_header(config_hash, seed))
    frame.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def table_to_string(frame, config_hash, seed):
    buf = io.StringIO()
    write_table(frame, buf, config_hash, seed)
    return buf.getvalue()


def read_table(f):
    return pd.read_csv(f, comment="#")


def read_provenance(f):
    """Returns the ``{"config_hash": ..., "seed": ...}`` recorded in the first line of a table, or an empty dict."""
    first = f.readline()
    if not first.startswith("#"):
        return {}
    fields = {}
    for part in first[1:].split(","):
        if "=" in part:
            key, value = part.split("=", 1)
            fields[key.strip()] = value.strip()
    return fields
