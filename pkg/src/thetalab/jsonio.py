"""JSON encodings for the external interfaces.

Complex scalars travel as ``[re, im]`` pairs, complex vectors as lists of
pairs, complex matrices as lists of rows of pairs.  Integer matrices (the
symplectic-algebra interface) are plain lists of integer rows.
"""

import json

import numpy as np


def complex_to_json(value):
    """Encode a complex scalar / vector / matrix as nested [re, im] pairs."""
    arr = np.asarray(value)
    if arr.ndim == 0:
        z = complex(arr)
        return [z.real, z.imag]
    return [complex_to_json(row) for row in arr]


def json_to_complex(obj):
    """Decode nested [re, im] pairs into a complex numpy array (or scalar)."""
    arr = np.asarray(obj, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise ValueError("expected nested [re, im] pairs")
    return np.ascontiguousarray(arr[..., 0] + 1j * arr[..., 1])


def load_complex(path):
    with open(path) as fh:
        return json_to_complex(json.load(fh))


def load_int_matrix(path):
    with open(path) as fh:
        data = json.load(fh)
    rows = [[int(x) for x in row] for row in data]
    width = {len(r) for r in rows}
    if len(width) != 1:
        raise ValueError("ragged integer matrix")
    return rows


def dump_json(obj, path=None, indent=2):
    """Serialize a report deterministically (sorted keys, stable floats)."""
    text = json.dumps(obj, indent=indent, sort_keys=True, allow_nan=True)
    if path is None:
        return text
    with open(path, "w") as fh:
        fh.write(text + "\n")
    return text
