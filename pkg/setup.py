"""
Setup script for the mixedtraces package.
"""

from setuptools import setup, find_packages

setup(
    name="mixedtraces",
    version="0.1.0",
    description="Numerical experiments on fractional Sobolev spaces with mixed boundary conditions",
    author="mixedtraces developers",
    packages=find_packages(exclude=["tests", "tests.*"]),
    package_data={"mixedtraces": ["fixtures/*.json"], "cli": ["static/*.txt"]},
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "shapely>=2.0.0",
        "pandas>=2.0.0",
        "pydantic>=2.0.0",
        "typer>=0.9.0",
        "rich>=13.0.0",
        "tqdm>=4.65.0",
        "typing-extensions>=4.7.0",
    ],
    extras_require={"dev": ["pytest>=7.0.0"]},
    python_requires=">=3.10",
    entry_points={
        "console_scripts": [
            "mixedtraces=cli.main:app",
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: Apache Software License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
