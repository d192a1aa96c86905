import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

PANEL_SIZE = (4.2, 3.2)
# fixed salt and no date, so that a plot depends only on its data
SVG_RC = {"svg.fonttype": "none", "svg.hashsalt": "frictionfolio"}


class Panel(object):
    def __init__(self, title, xlabel, ylabel, series=None):
        self.title = title
        self.xlabel = xlabel
        self.ylabel = ylabel
        # list of (label, xs, ys)
        self.series = series or []

    def add_series(self, label, xs, ys):
        self.series.append((label, np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)))

    @classmethod
    def from_frame(cls, frame, x, y, group, title, xlabel=None, ylabel=None, label_format="{}={:g}"):
        panel = cls(title, xlabel or x, ylabel or y)
        for value, sub in frame.groupby(group, sort=True):
            sub = sub.sort_values(x)
            panel.add_series(label_format.format(group, value), sub[x].values, sub[y].values)
        return panel

    def draw(self, ax):
        for label, xs, ys in self.series:
            ax.plot(xs, ys, label=label, linewidth=1.5)
        ax.set_title(self.title, fontsize=11)
        ax.set_xlabel(self.xlabel)
        ax.set_ylabel(self.ylabel)
        if self.series:
            ax.legend(fontsize=8)


def write_svg(panels, f):
    """Draws the panels side by side and writes them as an SVG document to the open text file ``f``."""
    with matplotlib.rc_context(SVG_RC):
        fig, axes = plt.subplots(1, len(panels), figsize=(PANEL_SIZE[0] * len(panels), PANEL_SIZE[1]),
                                 squeeze=False)
        try:
            for panel, ax in zip(panels, axes[0]):
                panel.draw(ax)
            fig.tight_layout()
            fig.savefig(f, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
