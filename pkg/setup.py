#!/usr/bin/env python
from setuptools import find_packages, setup

setup(
    name="floquetheat",
    version="0.1.0",
    description="Heat flows, work and cooling limits of periodically driven linear quantum networks coupled to thermal reservoirs",
    author="floquetheat developers",
    packages=find_packages(exclude=["tests", "tests.*"]),
    package_data={"floquetheat": ["fixtures/*.toml"]},
    install_requires=[
        "numpy",
        "scipy>=1.10",
        "pydantic>=2",
        "tqdm",
        "tomli; python_version < '3.11'",
    ],
    entry_points={"console_scripts": ["floquetheat = floquetheat.cli:main"]},
)
