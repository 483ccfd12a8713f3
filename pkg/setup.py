#!/usr/bin/python

from setuptools import setup


with open('requirements.txt') as f:
    required = f.read().splitlines()


setup(
    name='dirac_series',
    version='0.1',
    packages=['dirac_series', 'scripts'],
    package_data={'dirac_series': ['data/*.json']},
    entry_points={'console_scripts': ['dirac-screen = scripts.dirac_screen:cli_main']},
    install_requires=required,
    python_requires='>=3.9',
)
