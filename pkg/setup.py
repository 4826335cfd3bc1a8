#!/usr/bin/env python

from setuptools import setup
from setuptools import find_packages

import eulerkronecker

version = eulerkronecker.__version__

author = ''
author_email = ''

# Requirements
install_requires = ['numpy', 'scipy', 'numba', 'tqdm', 'pyyaml', 'tables',
                    'mpmath', 'sympy']
setup(
    name='eulerkronecker',
    version=version,
    description='Euler-Kronecker constants of prime cyclotomic fields',
    url='',
    license='',
    long_description='',
    author=author,
    maintainer=author,
    author_email=author_email,
    maintainer_email=author_email,
    install_requires=install_requires,
    packages=find_packages(exclude=['tests', 'examples', 'examples.*']),
    package_data={'eulerkronecker': ['*.yaml']},
    include_package_data=True,
    entry_points={
        'console_scripts': [
            'ek = eulerkronecker.cli:main',
        ]
    },
    platforms='any'
)
