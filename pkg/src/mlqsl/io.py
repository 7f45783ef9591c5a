"""JSON encodings of matrices, states, Hamiltonians and saturating specs.

A matrix is ``{"dim": n, "re": [...], "im": [...]}`` with the real and
imaginary parts listed row-major (flat; nested row lists are also accepted
on input). A vector is ``{"re": [...], "im": [...]}``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import SchemaError, ToolkitError
from .saturation import SaturatingSpec
from .states import DensityMatrix, Hamiltonian


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "dim": int(m.shape[0]),
        "re": [float(x) for x in m.real.ravel()],
        "im": [float(x) for x in m.imag.ravel()],
    }


def _floats(obj, key, where):
    if key not in obj:
        raise SchemaError(f"missing key {key!r}", where)
    try:
        arr = np.asarray(obj[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{key!r} must hold numbers: {exc}", where) from None
    return arr.ravel()


def matrix_from_json(obj, where: str = "$") -> np.ndarray:
    if not isinstance(obj, dict):
        raise SchemaError("matrix must be an object with 'dim', 're', 'im'", where)
    if "dim" not in obj:
        raise SchemaError("missing key 'dim'", where)
    dim = obj["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise SchemaError(f"'dim' must be a positive integer, got {dim!r}", where)
    re = _floats(obj, "re", where)
    im = _floats(obj, "im", where) if "im" in obj else np.zeros_like(re)
    if re.size != dim * dim or im.size != dim * dim:
        raise SchemaError(f"expected {dim * dim} entries in 're' and 'im'", where)
    return (re + 1j * im).reshape(dim, dim)


def vector_to_json(v) -> dict:
    v = np.asarray(v, dtype=complex)
    return {"re": [float(x) for x in v.real], "im": [float(x) for x in v.imag]}


def vector_from_json(obj, where: str = "$") -> np.ndarray:
    if not isinstance(obj, dict):
        raise SchemaError("vector must be an object with 're' and 'im'", where)
    re = _floats(obj, "re", where)
    im = _floats(obj, "im", where) if "im" in obj else np.zeros_like(re)
    if re.size != im.size:
        raise SchemaError("'re' and 'im' differ in length", where)
    return re + 1j * im


def state_to_json(rho: DensityMatrix) -> dict:
    return matrix_to_json(rho.matrix)


def state_from_json(obj, where: str = "$") -> DensityMatrix:
    m = matrix_from_json(obj, where)
    try:
        return DensityMatrix(m)
    except ToolkitError as exc:
        raise SchemaError(f"not a density matrix: {exc}", where) from None


def hamiltonian_to_json(H: Hamiltonian) -> dict:
    return matrix_to_json(H.matrix)


def hamiltonian_from_json(obj, where: str = "$") -> Hamiltonian:
    m = matrix_from_json(obj, where)
    try:
        return Hamiltonian(m)
    except ToolkitError as exc:
        raise SchemaError(f"not a Hamiltonian: {exc}", where) from None


def spec_to_json(spec: SaturatingSpec) -> dict:
    return {
        "hamiltonian": hamiltonian_to_json(spec.H),
        "level0": int(spec.level0),
        "level1": int(spec.level1),
        "delta": float(spec.delta),
        "weights": [float(w) for w in spec.weights],
        "pairing": [[vector_to_json(v0), vector_to_json(v1)] for v0, v1 in spec.pairing],
    }


def spec_from_json(obj) -> SaturatingSpec:
    if not isinstance(obj, dict):
        raise SchemaError("spec must be a JSON object", "$")
    for key in ("hamiltonian", "level0", "level1", "delta", "weights", "pairing"):
        if key not in obj:
            raise SchemaError(f"missing key {key!r}", "$")
    H = hamiltonian_from_json(obj["hamiltonian"], "$.hamiltonian")
    for key in ("level0", "level1"):
        if not isinstance(obj[key], int) or isinstance(obj[key], bool):
            raise SchemaError(f"{key!r} must be an integer level index", f"$.{key}")
    if not isinstance(obj["delta"], (int, float)) or isinstance(obj["delta"], bool):
        raise SchemaError("'delta' must be a number", "$.delta")
    weights = _floats(obj, "weights", "$")
    pairs = obj["pairing"]
    if not isinstance(pairs, list) or any(not isinstance(p, list) or len(p) != 2 for p in pairs):
        raise SchemaError("'pairing' must be a list of [ground, excited] vector pairs", "$.pairing")
    pairing = [
        (vector_from_json(p[0], f"$.pairing[{j}][0]"), vector_from_json(p[1], f"$.pairing[{j}][1]"))
        for j, p in enumerate(pairs)
    ]
    return SaturatingSpec(H, obj["level0"], obj["level1"], float(obj["delta"]), weights, pairing)


def load_json(path) -> object:
    """Parse a JSON file, turning syntax errors into :class:`SchemaError` with line context."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: {exc.msg}", f"line {exc.lineno}, column {exc.colno}") from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
