# Copyright 2018 Spotify AB. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import setuptools

setuptools.setup(
    name="shiftlab",
    version="0.1.0",
    description="Numerical laboratory for expansive and shift-like operators on Hardy spaces",
    long_description=open("README.md", "r+", encoding="utf-8").read(),
    long_description_content_type="text/markdown",
    packages=["shiftlab"],
    install_requires=[
        "numpy>=1.21",
        "scipy>=1.7",
        "SQLAlchemy~=1.4",
        "tomli>=1.1; python_version<'3.11'",
    ],
    entry_points={"console_scripts": ["shiftlab=shiftlab.cli:main"]},
    include_package_data=True,
    python_requires=">=3.8",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
