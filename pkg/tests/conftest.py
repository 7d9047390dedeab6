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

"""Global test fixtures"""
from datetime import datetime

import pytest

from shiftlab import ShiftLab
from shiftlab.data_store import DataStore
from shiftlab.experiments import create_lab
from shiftlab.inner_fn import BlaschkeProduct
from shiftlab.model import RunRecord

# pylint: disable=redefined-outer-name


@pytest.fixture
def app() -> ShiftLab:
    """Returns a ShiftLab with every built-in experiment registered and no archive."""
    yield create_lab()


@pytest.fixture
def chi_squared() -> BlaschkeProduct:
    """θ = χ², whose Clark measure sits on ±1 with weights ½."""
    return BlaschkeProduct.monomial(2)


@pytest.fixture
def mixed_blaschke() -> BlaschkeProduct:
    """θ(0) = 0 with two zeros off the origin."""
    return BlaschkeProduct.from_zeros([0j, 0.5, -0.3 + 0.4j])


@pytest.fixture
def data_store() -> DataStore:
    """Creates a SQLite backed datastore."""
    return DataStore("sqlite://")


@pytest.fixture
def data_store_with_runs(data_store) -> DataStore:
    """Creates a data store holding two runs of one configuration and one of another."""
    data_store.add_record(
        RunRecord(
            experiment="clark",
            config_fingerprint="c1",
            payload_fingerprint="p1",
            version="0.1.0",
            passed=True,
            report={"verdicts": []},
            ran_at=datetime(2024, 6, 1, 9, 0, 0),
        )
    )
    data_store.add_record(
        RunRecord(
            experiment="clark",
            config_fingerprint="c1",
            payload_fingerprint="p2",
            version="0.1.0",
            passed=False,
            report={"verdicts": []},
            ran_at=datetime(2024, 6, 1, 9, 30, 0),
        )
    )
    data_store.add_record(
        RunRecord(
            experiment="thm69",
            config_fingerprint="c2",
            payload_fingerprint="p3",
            version="0.1.0",
            passed=True,
            report={"verdicts": []},
            ran_at=datetime(2024, 6, 1, 10, 0, 0),
        )
    )
    yield data_store


@pytest.fixture
def config_file(tmp_path):
    """Factory writing a TOML configuration into the test's temporary directory."""

    def write(text: str, name: str = "experiment.toml") -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write
