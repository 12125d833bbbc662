from pathlib import Path
from setuptools import setup, find_packages

this_directory = Path(__file__).parent
long_description = (this_directory / "README.md").read_text(encoding="utf-8")

setup(
    name="romlineage",
    version="0.1.0",
    description="Locate BASIC interpreter routines in 8-bit ROM images and classify their lineage",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(include=["romlineage", "romlineage.*"]),
    package_data={"romlineage.data": ["*.csv", "*.sig"]},
    install_requires=[
        "click>=8.1",
        "numpy>=1.20",
        "pandas",
        "polars>=0.20",
        "pydantic>=2",
    ],
    extras_require={
        "test": ["pytest>=7"],
    },
    entry_points={
        "console_scripts": ["romlineage = romlineage.cli:cli"],
    },
    python_requires=">=3.9",
    include_package_data=True,
    classifiers=[
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
        "License :: OSI Approved :: MIT License",
        "Intended Audience :: Developers",
        "Topic :: System :: Hardware",
        "Topic :: Software Development :: Disassemblers",
    ],
    zip_safe=False,
)
