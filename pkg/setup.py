from setuptools import find_packages
from setuptools import setup

setup(
    name="pydhtsp",
    version="0.1.0",
    packages=find_packages(exclude=["test", "test.*"]),
    install_requires=[
        "numpy>=1.24",
        "networkx>=3.2",
    ],
    entry_points={
        "console_scripts": ["pydhtsp=pydhtsp.cli:main"],
    },
)
