import io

import pandas as pd
from nose.tools import assert_equal, assert_dict_equal
from pandas.testing import assert_frame_equal

from frictionfolio.util.common.tables import write_table, table_to_string, read_table, read_provenance


def test_table_starts_with_provenance():
    frame = pd.DataFrame({"W": [1.0, 2.5], "omega": [0.375, 1.0 / 3]})
    text = table_to_string(frame, "0123456789abcdef", 5)
    lines = text.split("\n")
    assert_equal(lines[0], "# config_hash=0123456789abcdef, seed=5")
    assert_equal(lines[1], "W,omega")
    assert_equal(lines[2], "1,0.375")
    assert_equal(lines[3], "2.5,0.3333333333")


def test_read_back():
    frame = pd.DataFrame({"W": [1.0, 2.5], "status": ["ok", "failed"]})
    buf = io.StringIO()
    write_table(frame, buf, "abc", 0)
    buf.seek(0)
    assert_dict_equal(read_provenance(buf), {"config_hash": "abc", "seed": "0"})
    buf.seek(0)
    assert_frame_equal(read_table(buf), frame)


def test_identical_inputs_give_identical_text():
    frame = pd.DataFrame({"x": [0.1, 0.2, 0.3]})
    assert_equal(table_to_string(frame, "h", 1), table_to_string(frame.copy(), "h", 1))


def test_provenance_missing():
    assert_dict_equal(read_provenance(io.StringIO("a,b\n1,2\n")), {})
