# Setup configuration for packaging
from setuptools import find_packages, setup

setup(
    name="stimuli",
    version="0.1.0",
    description="Emotion stimulus detection: clause extraction, sequence labelling and clause classification",
    packages=find_packages(exclude=["tests", "tests.*"]),
    python_requires=">=3.8",
    install_requires=[
        "numpy",
        "pandas",
        "PyYAML",
        "jsonschema",
    ],
    entry_points={"console_scripts": ["stimuli=stimuli.cli:main"]},
)
