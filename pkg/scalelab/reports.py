"""Deterministic CSV and JSON output.

Every file carries the tool version and the sha256 of the configuration
that produced it. Floats are rounded to 12 significant digits so that runs
differing only in summation order below that precision write identical
bytes.
"""

import json
import math
import os

import numpy as np
import pandas as pd

from . import utils

SCHEMA_VERSION = 1


def _version():
    from . import __version__

    return __version__


def normalize(value):
    """JSON-ready copy of ``value``: floats rounded, complex numbers as
    ``{"re": ..., "im": ...}``, numpy scalars and arrays unwrapped and
    non-finite floats spelled out.
    """
    if isinstance(value, dict):
        return {str(key): normalize(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [normalize(item) for item in value]
    if isinstance(value, np.ndarray):
        return normalize(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": normalize(value.real), "im": normalize(value.imag)}
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return str(value)
        return utils.round_significant(value)
    return value


def write_json(path, payload, sha256):
    """Write ``payload`` with ``schema_version``, ``tool_version`` and
    ``config_sha256`` fields added.
    """
    document = dict(payload)
    document.update(
        {
            "schema_version": SCHEMA_VERSION,
            "tool_version": _version(),
            "config_sha256": sha256,
        }
    )
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(normalize(document), handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path


def write_csv(path, rows, columns, sha256):
    """Write ``rows`` (dicts) with a ``# scalelab <version> config_sha256=...``
    comment line before the header.
    """
    frame = pd.DataFrame([{key: row[key] for key in columns} for row in rows], columns=columns)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(f"# scalelab {_version()} config_sha256={sha256}\n")
        frame.to_csv(handle, index=False, float_format="%.12g", lineterminator="\n")
    return path


def read_csv(path):
    """Read a file written by :func:`write_csv` back into a DataFrame."""
    return pd.read_csv(path, comment="#")
