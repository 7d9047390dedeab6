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

"""Data Store module - interface to the run archive."""

from typing import Any, Dict, List, Optional

import sqlalchemy
import sqlalchemy.orm
from sqlalchemy.pool import StaticPool

from shiftlab.model import BaseRecord, RunRecord


class DataStore:
    """Abstraction of the shiftlab run archive.

    Args:
        database_uri: Database URL to connect to. Will be passed to sqlalchemy.create_engine, refer to that
        documentation for formats.
    """

    def __init__(self, database_uri: str) -> None:
        """Creates a new DataStore instance

        Args:
            database_uri (str): Database URL to connect to, passed to sqlalchemy.create_engine.
        """
        options: Dict[str, Any] = {}
        if database_uri in ("sqlite://", "sqlite:///:memory:"):
            # sweep workers share the one in-memory database
            options = {"poolclass": StaticPool, "connect_args": {"check_same_thread": False}}
        # Setting "future" for 2.0 syntax
        engine = sqlalchemy.create_engine(database_uri, future=True, **options)
        # records are read after their session closes
        self.session = sqlalchemy.orm.sessionmaker(engine, future=True, expire_on_commit=False)

        BaseRecord.metadata.create_all(engine)

    def add_record(self, record: RunRecord) -> None:
        """Store a record in the data store.

        Args:
            record: the record object to store
        """
        with self.session.begin() as session:
            session.add(record)

    def get_latest_run(self, config_fingerprint: str) -> Optional[RunRecord]:
        """The most recent run archived for a configuration.

        Args:
            config_fingerprint: fingerprint of the resolved configuration
        Returns:
            RunRecord: the latest matching record, or None
        """
        with self.session.begin() as session:
            return (
                session.query(RunRecord)
                .filter(RunRecord.config_fingerprint == config_fingerprint)
                .order_by(RunRecord.ran_at.desc(), RunRecord.id.desc())
                .first()
            )

    def get_runs(self, experiment: str) -> List[RunRecord]:
        """All archived runs of an experiment, oldest first.

        Args:
            experiment: the experiment name
        Returns:
            list: list of `RunRecord`s
        """
        with self.session.begin() as session:
            return session.query(RunRecord).filter(RunRecord.experiment == experiment).order_by(RunRecord.id).all()
