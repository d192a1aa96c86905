import matplotlib
import numpy
import pandas
import scipy
import yaml

VERSION = "1.0"
RELEASE_DATE = "October 19, 2026"

DEPENDENCIES = [
    {"name": "NumPy", "module": numpy, "url": "https://numpy.org"},
    {"name": "SciPy", "module": scipy, "url": "https://scipy.org"},
    {"name": "pandas", "module": pandas, "url": "https://pandas.pydata.org"},
    {"name": "PyYAML", "module": yaml, "url": "https://pyyaml.org"},
    {"name": "Matplotlib", "module": matplotlib, "url": "https://matplotlib.org"},
]


def frictionfolio_about():
    description = f"""frictionfolio {VERSION}
Portfolio optimization under liquidity risk and transaction costs
Released on {RELEASE_DATE}
"""

    for dependency in DEPENDENCIES:
        description += "\n- {} {}".format(dependency["name"], getattr(dependency["module"], "__version__", "unknown"))
        if "url" in dependency:
            description += "\n  {}".format(dependency["url"])
    return description
