"""JSON encoding helpers: complex arrays as nested ``[re, im]`` pairs."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return np.stack([m.real, m.imag], axis=-1).tolist()


def decode_matrix(obj) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    if arr.shape[-1:] != (2,):
        raise ValueError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def load_json_arg(value: str) -> Any:
    """Inline JSON text, or ``@path`` / a path to a JSON file."""
    text = value.strip()
    if text.startswith("@"):
        return json.loads(Path(text[1:]).read_text())
    if text[:1] in "{[":
        return json.loads(text)
    return json.loads(Path(text).read_text())


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def dumps(obj: Any, pretty: bool = False) -> str:
    return json.dumps(obj, default=_default, indent=2 if pretty else None, sort_keys=True)
