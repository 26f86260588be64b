"""
Setup script for sqclp
"""

from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

with open("requirements.txt", "r", encoding="utf-8") as f:
    requirements = [line.split("#")[0].strip() for line in f.read().splitlines()]
    requirements = [line for line in requirements if line and not line.startswith("pytest")]

setup(
    name="sqclp",
    version="1.0.0",
    description="Qualified constraint logic programming with proximity relations",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests"]),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Software Development :: Interpreters",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
    ],
    python_requires=">=3.8",
    install_requires=requirements,
    package_data={
        "src": ["assets/*.lark"],
    },
    entry_points={
        "console_scripts": [
            "sqclp=src.main:main",
        ],
    },
)
