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

"""Helper functions to compute the fingerprint of run reports."""

import json
from collections.abc import Iterable
from copy import deepcopy
from hashlib import shake_256

import numpy as np

HASH_BYTES = 16  # 32 character hexdigest

ENVELOPE_FIELDS = ["envelope", "artifacts", "fingerprint"]


def to_jsonable(value):
    """`json.dumps` default hook for numpy scalars, arrays and complex numbers.

    Args:
        value (object): value json could not serialize
    Returns:
        object: a JSON-serializable equivalent
    Raises:
        TypeError: for anything else
    """
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return np.stack([value.real, value.imag], axis=-1).tolist()
        return value.tolist()
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (bool, int, float, str)):
        return value
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def payload_fingerprint(report, blacklist=None, prefix=""):
    """Computes the fingerprint of a report by hashing everything but its envelope.

    Args:
        report (dict): the report to be hashed (excluding the fields in blacklist)
        blacklist (list): fields to ignore, str for toplevel fields or a list of str for nested ones;
            defaults to ENVELOPE_FIELDS
        prefix (str): string that should be prepended to the fingerprint hash
    Returns:
        str: the fingerprint
    """
    report_copy = deepcopy(report)
    filtered = filter_dict(report_copy, ENVELOPE_FIELDS if blacklist is None else blacklist)
    return f"{prefix}{dict_to_hash(filtered)}"


def filter_dict(orig_dict, blacklist):
    """Filter the keys in blacklist from the orig_dict.

    A string removes a toplevel key; a list of strings is a path to a nested key, e.g. ["config", "output"].

    Args:
        orig_dict (dict): the dict to filter.
        blacklist (list): strings and lists of strings as described above.
    Returns:
        dict: the filtered dict.
    """
    for item in blacklist:
        if isinstance(item, str):
            orig_dict.pop(item, None)
        elif isinstance(item, Iterable):
            pointer = orig_dict
            for sub in item[:-1]:
                pointer = pointer.get(sub, {})
            pointer.pop(item[-1], None)

    return orig_dict


def dict_to_hash(input_dict):
    """Converts a dictionary into a hash string; key order does not matter.

    Args:
        input_dict (dict): input that will be hashed
    Returns:
        str: hash in hexadecimal representation
    """
    return str_to_hash(json.dumps(input_dict, sort_keys=True, default=to_jsonable))


def str_to_hash(input_str):
    """Hash a string with SHA-3 shake reduced to HASH_BYTES.

    Args:
        input_str (str): input that will be hashed
    Returns:
        str: hash in hexadecimal representation (2 characters per byte)
    """
    return shake_256(input_str.encode("utf-8")).hexdigest(HASH_BYTES)  # pylint: disable=too-many-function-args
