#!/usr/bin/env python

from setuptools import setup, find_packages

install_requires = [
    "PyYAML>=5.1",
    "numpy>=1.22",
    "scipy>=1.10",
    "pandas>=1.5",
    "matplotlib>=3.5"
]

setup(
    name="frictionfolio",
    version="1.0",
    description="Portfolio optimization under liquidity risk and transaction costs",
    packages=find_packages(exclude=["tests", "tests.*"]),
    include_package_data=True,
    package_data={
        "frictionfolio": ["assets/*.txt", "assets/params/*.yml", "assets/experiments/*.yml"]
    },

    install_requires=install_requires,
    entry_points={
        "console_scripts": [
            "frictionfolio-cli = frictionfolio.ui.cli:main",
            "frictionfolio-synth = frictionfolio.tools.synthetic_chains:main"
        ]
    },

    test_suite="nose.collector",
    tests_require=[
        "pynose>=1.4",
        "coverage>=6.0"
    ],
)
