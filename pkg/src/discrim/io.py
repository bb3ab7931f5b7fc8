"""JSON ensemble files and deterministic report serialization.

Ensemble file (schema version 1)::

    {
      "schema_version": 1,
      "dim": 2,
      "states": [
        {"prior": 0.5, "matrix": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]},
        ...
      ]
    }

Each complex entry is a ``[re, im]`` pair; matrices are row-major lists of
rows. Floats are written with ``repr`` (shortest round-trip form).
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from . import _config
from .ensemble import Ensemble
from .exceptions import DiscrimError

SCHEMA_VERSION = 1


class ParseError(DiscrimError, ValueError):
    """The input file is unreadable, not JSON, or does not match the schema."""


def encode_matrix(a) -> list:
    a = np.asarray(a, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def decode_matrix(obj, dim: int, where: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != dim:
        raise ParseError(f"{where}: expected {dim} rows")
    out = np.empty((dim, dim), dtype=complex)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != dim:
            raise ParseError(f"{where}: row {i} must have {dim} entries")
        for j, z in enumerate(row):
            if (
                not isinstance(z, list)
                or len(z) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in z)
            ):
                raise ParseError(f"{where}: entry ({i}, {j}) must be a [re, im] pair of numbers")
            out[i, j] = complex(z[0], z[1])
    return out


def ensemble_to_dict(e: Ensemble) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "dim": e.dim,
        "states": [
            {"prior": float(p), "matrix": encode_matrix(r)} for p, r in e
        ],
    }


def ensemble_from_dict(doc, max_states: int = _config.MAX_STATES) -> Ensemble:
    """Parse a schema-v1 document; schema problems raise :class:`ParseError`.

    Invariant violations (priors, traces, positivity) surface as
    :class:`~discrim.exceptions.ValidationError` from the ensemble itself.
    """
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object")
    if "schema_version" not in doc:
        raise ParseError("missing 'schema_version'")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {doc['schema_version']!r}")
    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ParseError("'dim' must be a positive integer")
    states = doc.get("states")
    if not isinstance(states, list) or not states:
        raise ParseError("'states' must be a non-empty list")
    if len(states) > max_states:
        raise ParseError(f"{len(states)} states exceed the limit of {max_states}")
    priors, mats = [], []
    for k, item in enumerate(states):
        if not isinstance(item, dict) or "prior" not in item or "matrix" not in item:
            raise ParseError(f"states[{k}] needs 'prior' and 'matrix'")
        p = item["prior"]
        if not isinstance(p, (int, float)) or isinstance(p, bool):
            raise ParseError(f"states[{k}].prior must be a number")
        priors.append(float(p))
        mats.append(decode_matrix(item["matrix"], dim, f"states[{k}].matrix"))
    return Ensemble(priors, mats)


def read_ensemble(path) -> Ensemble:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    return ensemble_from_dict(doc)


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2, allow_nan=False) + "\n"


def atomic_write(path, text: str) -> None:
    """Write `text` to `path` via a temporary file so no partial file is left."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        # mkstemp creates 0600; give the result ordinary umask permissions
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
