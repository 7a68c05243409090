#!/usr/bin/env python3
# setup.py - Package Manifest for the Maxent Chaos-Expansion Toolkit
"""
Installs the flat module layout and the `uq` console script.

    pip install -e .
    uq config show
"""

from pathlib import Path

from setuptools import setup

def read_requirements():
    """Runtime pins from requirements.txt, test tools excluded"""
    test_only = ("pytest", "hypothesis")
    lines = Path(__file__).with_name("requirements.txt").read_text().splitlines()
    return [line.strip() for line in lines if line.strip() and not line.startswith(test_only)]

setup(
    name="maxent-chaos",
    version="0.1.0",
    description="Maximum-entropy and arbitrary polynomial chaos surrogates for linear stochastic ODEs",
    python_requires=">=3.9",
    py_modules=[
        "models",
        "system_config",
        "maxent_basis",
        "empirical_measure",
        "apc_basis",
        "galerkin_surrogate",
        "function_approx",
        "experiments",
        "uq",
    ],
    install_requires=read_requirements(),
    extras_require={"test": ["pytest==7.4.3", "hypothesis==6.92.1"]},
    entry_points={"console_scripts": ["uq=uq:main"]},
)
