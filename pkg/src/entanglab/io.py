"""File formats: state/operator JSON, trajectory CSV, summary JSON.

State and operator files look like::

    {"d_a": 2, "d_b": 2, "kind": "operator",
     "data": [[[re, im], [re, im], ...], ...]}

``kind`` is ``pure`` (data is a flat list of d_a*d_b [re, im] pairs in
A-major order), ``density`` or ``operator`` (data is a row-major list of
rows). All writes go to a temporary file in the target directory that is
renamed into place, so a reader never sees a partial file.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .dynamics import CSV_FIELDS, Trajectory
from .hamiltonian import BipartiteOperator
from .hilbert import PureState, check_density

KINDS = ("pure", "density", "operator")


class FormatError(ValueError):
    """Input file violates the documented format or a state invariant."""


def atomic_write(path, data: str | bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"newline": ""})) as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def to_jsonable(value):
    """Convert numpy scalars/arrays; non-finite floats become null."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(value.real), to_jsonable(value.imag)]
    return value


def dumps(obj, indent: int | None = 2) -> str:
    """Deterministic JSON text: sorted keys, shortest round-trip floats."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=indent) + "\n"


def _pairs(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).reshape(-1)]


def encode_array(dims, kind: str, values) -> dict:
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    arr = np.asarray(values, dtype=complex)
    data = _pairs(arr) if kind == "pure" else [_pairs(row) for row in arr]
    return {"d_a": int(dims[0]), "d_b": int(dims[1]), "kind": kind, "data": data}


def _complex_entry(x, where: str) -> complex:
    if (not isinstance(x, list) or len(x) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x)):
        raise FormatError(f"data entry {where} is not a [re, im] number pair")
    z = complex(x[0], x[1])
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise FormatError(f"data entry {where} is not finite")
    return z


def decode_array(obj) -> tuple[tuple[int, int], str, np.ndarray]:
    """Parse a decoded JSON object; raises FormatError naming the problem."""
    if not isinstance(obj, dict):
        raise FormatError("top level must be a JSON object")
    for key in ("d_a", "d_b", "kind", "data"):
        if key not in obj:
            raise FormatError(f"missing field {key!r}")
    d_a, d_b = obj["d_a"], obj["d_b"]
    for name, d in (("d_a", d_a), ("d_b", d_b)):
        if not isinstance(d, int) or isinstance(d, bool) or d < 1:
            raise FormatError(f"{name} must be a positive integer")
    kind = obj["kind"]
    if kind not in KINDS:
        raise FormatError(f"kind must be one of {', '.join(KINDS)}")
    n = d_a * d_b
    data = obj["data"]
    if not isinstance(data, list):
        raise FormatError("data must be a list")
    if kind == "pure":
        if len(data) != n:
            raise FormatError(f"dimension mismatch: pure state needs {n} entries, got {len(data)}")
        arr = np.array([_complex_entry(x, f"[{i}]") for i, x in enumerate(data)])
    else:
        if len(data) != n or any(not isinstance(r, list) or len(r) != n for r in data):
            raise FormatError(f"dimension mismatch: {kind} needs {n} rows of {n} entries")
        arr = np.array([[_complex_entry(x, f"[{i}][{j}]") for j, x in enumerate(r)]
                        for i, r in enumerate(data)])
    return (d_a, d_b), kind, arr


def _load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON: {exc.msg} at line {exc.lineno}") from None


def read_operator(path, *, require_hermitian: bool = True) -> BipartiteOperator:
    dims, kind, arr = decode_array(_load_json(path))
    if kind == "pure":
        raise FormatError("expected an operator or density, got kind 'pure'")
    try:
        return BipartiteOperator(dims, arr, hermitian=require_hermitian)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def read_state(path):
    """PureState for kind 'pure', validated density matrix for 'density'."""
    dims, kind, arr = decode_array(_load_json(path))
    try:
        if kind == "pure":
            return PureState(dims, arr)
        if kind == "density":
            return dims, check_density(arr)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    raise FormatError("expected a pure or density state, got kind 'operator'")


def write_array(path, dims, kind: str, values) -> Path:
    return atomic_write(path, dumps(encode_array(dims, kind, values), indent=None))


def _cell(v) -> str:
    if v is None:
        return ""
    v = float(v)
    return repr(v) if math.isfinite(v) else ""


def trajectory_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for row in traj.rows():
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_trajectory_csv(path, traj: Trajectory) -> Path:
    return atomic_write(path, trajectory_csv(traj))


def read_trajectory_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    header, body = rows[0], rows[1:]
    return {name: np.array([float(r[i]) if r[i] else np.nan for r in body])
            for i, name in enumerate(header)}


def write_summary(path, scenario: str, parameters: dict, metrics: dict) -> Path:
    return atomic_write(path, dumps({"scenario": scenario, "parameters": parameters,
                                     "metrics": metrics}))
