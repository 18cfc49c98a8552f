#!/usr/bin/env python

"""The setup script."""

from setuptools import setup, find_packages

with open("README.rst", encoding='UTF-8') as readme_file:
    readme = readme_file.read()

with open("requirements.txt", encoding='UTF-8') as requirements_file:
    requirements = requirements_file.readlines()

setup_requirements = [
    "pytest-runner",
]

test_requirements = [
    "pytest>=3",
    "deepdiff",
]

setup(
    author="daniele de gregorio",
    author_email="daniele.degregorio@eyecan.ai",
    python_requires=">=3.8",
    classifiers=[
        "Development Status :: 2 - Pre-Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: GNU General Public License v3 (GPLv3)",
        "Natural Language :: English",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    description="buffer allocation for loss clusters of processor-sharing servers",
    entry_points={
        "console_scripts": [
            "slotlime=slotlime.cli.main:slotlime",
        ],
    },
    install_requires=requirements,
    license="GNU General Public License v3",
    long_description=readme,
    include_package_data=True,
    keywords="slotlime",
    name="slotlime",
    packages=find_packages(include=["slotlime", "slotlime.*"]),
    setup_requires=setup_requirements,
    test_suite="tests",
    tests_require=test_requirements,
    url="https://github.com/eyecan-ai/slotlime",
    version="0.1.0",
    zip_safe=False,
)
