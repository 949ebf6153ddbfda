# ----------------------------------------------------------------------------
# Copyright (c) 2019, q2-hieralign development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import re

from setuptools import find_packages, setup


with open('q2_hieralign/_version.py') as fh:
    version = re.search(r"__version__ = '(.+)'", fh.read()).group(1)


setup(
    name='q2-hieralign',
    version=version,
    license='BSD-3-Clause',
    packages=find_packages(),
    author="q2-hieralign development team",
    description=("Structure-aware alignment of music performances to sheet "
                 "music."),
    url="https://qiime2.org/",
    entry_points={
        'qiime2.plugins':
        ['q2-hieralign=q2_hieralign.plugin_setup:plugin']
    },
    package_data={
        'q2_hieralign.tests': ['data/*.json', 'data/*.txt', 'data/piece/*'],
        'q2_hieralign': ['assets/index.html']
    },
    zip_safe=False,
)
