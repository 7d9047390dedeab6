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

"""Model module - hosting database models."""
import json
from datetime import datetime

import sqlalchemy
import sqlalchemy.orm

from shiftlab.fingerprint import to_jsonable

BaseRecord = sqlalchemy.orm.declarative_base()


class JSONType(sqlalchemy.types.TypeDecorator):  # pylint: disable=abstract-method
    """JSON column stored as text everywhere but on dialects with a native JSON type."""

    impl = sqlalchemy.UnicodeText

    cache_ok = True

    def load_dialect_impl(self, dialect):
        """Use the native JSON type on mysql and postgresql.

        Args:
            dialect (object): SQLAlchemy dialect object
        Returns:
            object: the type descriptor for the dialect
        """
        if dialect.name in ("mysql", "postgresql"):
            return dialect.type_descriptor(sqlalchemy.JSON())
        return dialect.type_descriptor(self.impl)

    def process_bind_param(self, value, dialect):
        if dialect.name in ("mysql", "postgresql"):
            return value
        if value is not None:
            value = json.dumps(value, sort_keys=True, default=to_jsonable)
        return value

    def process_result_value(self, value, dialect):
        if dialect.name in ("mysql", "postgresql"):
            return value
        if value is not None:
            value = json.loads(value)
        return value


class RunRecord(BaseRecord):
    """One archived experiment run.

    Args:
        args (list) : arguments list passed to the BaseRecord constructor
        kwargs (dict) : arguments dict passed to the BaseRecord constructor
    """

    __tablename__ = "run"
    id = sqlalchemy.Column(sqlalchemy.Integer, primary_key=True)
    experiment = sqlalchemy.Column(sqlalchemy.String(64), nullable=False)
    config_fingerprint = sqlalchemy.Column(sqlalchemy.String(64), index=True)
    payload_fingerprint = sqlalchemy.Column(sqlalchemy.String(64))
    version = sqlalchemy.Column(sqlalchemy.String(32))
    passed = sqlalchemy.Column(sqlalchemy.Boolean, default=False)
    report = sqlalchemy.Column(JSONType())

    ran_at = sqlalchemy.Column(sqlalchemy.DateTime, default=datetime.utcnow)

    def __repr__(self):
        return (
            f"RunRecord(id={self.id!r}, experiment={self.experiment!r}, "
            f"payload_fingerprint={self.payload_fingerprint!r}, passed={self.passed!r})"
        )
