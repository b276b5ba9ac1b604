"""JSON reading and writing shared by the command line front end."""

from __future__ import annotations

import json

import numpy as np

from .errors import MalformedInputError
from .graph import validate_graph


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def load_graph(path):
    return validate_graph(load_json(path))


def parse_complex(value):
    """A number or an ``[re, im]`` pair."""
    if isinstance(value, bool):
        raise MalformedInputError(f"not a complex number: {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(value[0], value[1])
    raise MalformedInputError(f"not a complex number: {value!r}")


def parse_matrix(rows):
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise MalformedInputError("matrix must be a list of rows")
    return np.array([[parse_complex(v) for v in r] for r in rows], dtype=complex).reshape(len(rows), -1)


def to_jsonable(obj):
    """Convert numpy scalars/arrays and complex numbers to plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def dumps(obj):
    """Deterministic serialization: sorted keys, fixed indentation."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2)
