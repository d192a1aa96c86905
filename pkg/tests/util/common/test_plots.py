import io

import pandas as pd
from nose.tools import assert_equal, assert_true, assert_in

from frictionfolio.util.common.plots import Panel, write_svg
from frictionfolio.util.common.tables import table_to_string, read_table


def _frame():
    return pd.DataFrame({"beta": [0.1, 0.1, 0.5, 0.5], "W": [1.0, 2.0, 1.0, 2.0], "omega": [0.4, 0.3, 0.2, 0.1]})


def _render(panels):
    f = io.StringIO()
    write_svg(panels, f)
    return f.getvalue()


def test_from_frame_groups_series():
    panel = Panel.from_frame(_frame(), "W", "omega", "beta", "omega vs W")
    assert_equal(len(panel.series), 2)
    assert_equal(panel.series[0][0], "beta=0.1")
    assert_equal(panel.series[1][0], "beta=0.5")
    assert_equal(list(panel.series[0][1]), [1.0, 2.0])


def test_write_svg():
    svg = _render([Panel.from_frame(_frame(), "W", "omega", "beta", "omega vs W")])
    assert_in("<svg", svg)
    assert_in("omega vs W", svg)
    assert_in("beta=0.5", svg)
    assert_true(svg.rstrip().endswith("</svg>"))


def test_empty_panel():
    svg = _render([Panel("empty", "x", "y"), Panel("also empty", "x", "y")])
    assert_in("also empty", svg)


def test_plot_regenerated_from_csv_is_identical():
    frame = _frame()
    first = _render([Panel.from_frame(frame, "W", "omega", "beta", "p")])
    reread = read_table(io.StringIO(table_to_string(frame, "h", 0)))
    assert_equal(_render([Panel.from_frame(reread, "W", "omega", "beta", "p")]), first)
