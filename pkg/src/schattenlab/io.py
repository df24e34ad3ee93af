"""File formats: Hamiltonian JSON, sparse-matrix text, gate-sequence JSON, model JSON.

Hamiltonian JSON::

    {"n": 2, "terms": [{"qubits": [0], "matrix": [[[re, im], ...], ...]}]}

Matrix entries may also be plain real numbers.  Gate sequences use the same
layout with a ``gates`` list.  The sparse text format has a header line
``N d class`` followed by ``i j re im`` lines for the upper triangle
(diagonal included); ``#`` starts a comment.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .clock import GateSequence
from .errors import InputError
from .graphs import DegreeModel, power_law_weights, uniform_weights
from .hamiltonian import LocalTerm, LogLocalHamiltonian, MatrixClass, SparseHermitian


def _parse_matrix(raw, path=None) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad matrix entries: {exc}", path) from None
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim == 2:
        return arr.astype(complex)
    raise InputError(f"matrix must be 2-D real or [re, im] pairs, got shape {arr.shape}", path)


def _encode_matrix(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def _load_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(str(exc), path) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(exc.msg, path, exc.lineno) from None


def hamiltonian_from_dict(doc: dict, path=None, enforce_locality: bool = True) -> LogLocalHamiltonian:
    try:
        n = int(doc["n"])
        terms = [LocalTerm(t["qubits"], _parse_matrix(t["matrix"], path)) for t in doc["terms"]]
    except (KeyError, TypeError) as exc:
        raise InputError(f"missing or malformed field {exc}", path) from None
    except ValueError as exc:
        raise InputError(str(exc), path) from None
    return LogLocalHamiltonian(n, tuple(terms), enforce_locality)


def hamiltonian_to_dict(h: LogLocalHamiltonian) -> dict:
    return {"n": h.n, "terms": [{"qubits": list(t.qubits), "matrix": _encode_matrix(t.matrix)} for t in h.terms]}


def load_hamiltonian(path, enforce_locality: bool = True) -> LogLocalHamiltonian:
    return hamiltonian_from_dict(_load_json(path), path, enforce_locality)


def save_hamiltonian(h: LogLocalHamiltonian, path) -> None:
    Path(path).write_text(json.dumps(hamiltonian_to_dict(h), indent=1))


def gates_from_dict(doc: dict, path=None) -> GateSequence:
    try:
        gates = tuple((g["qubits"], _parse_matrix(g["matrix"], path)) for g in doc["gates"])
        return GateSequence(int(doc["n"]), gates)
    except (KeyError, TypeError) as exc:
        raise InputError(f"missing or malformed field {exc}", path) from None
    except ValueError as exc:
        raise InputError(str(exc), path) from None


def gates_to_dict(seq: GateSequence) -> dict:
    return {"n": seq.n, "gates": [{"qubits": list(q), "matrix": _encode_matrix(m)} for q, m in seq.gates]}


def load_gates(path) -> GateSequence:
    return gates_from_dict(_load_json(path), path)


def save_gates(seq: GateSequence, path) -> None:
    Path(path).write_text(json.dumps(gates_to_dict(seq), indent=1))


def read_sparse(path) -> SparseHermitian:
    """Parse the ``N d class`` / ``i j re im`` text format."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise InputError(str(exc), path) from None
    header = None
    edges = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 3:
                raise InputError("header must be 'N d class'", path, lineno)
            try:
                header = (int(parts[0]), int(parts[1]), MatrixClass(parts[2]))
            except ValueError as exc:
                raise InputError(f"bad header: {exc}", path, lineno) from None
            continue
        if len(parts) not in (3, 4):
            raise InputError("entry lines are 'i j re [im]'", path, lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
            v = complex(float(parts[2]), float(parts[3]) if len(parts) == 4 else 0.0)
        except ValueError as exc:
            raise InputError(str(exc), path, lineno) from None
        if i > j:
            raise InputError(f"entry ({i},{j}) is below the diagonal", path, lineno)
        if not (0 <= i < header[0] and 0 <= j < header[0]):
            raise InputError(f"index out of range for N = {header[0]}", path, lineno)
        edges.append((i, j, v))
    if header is None:
        raise InputError("empty file", path)
    n, d, cls = header
    try:
        a = SparseHermitian.from_edges(n, edges, cls)
    except ValueError as exc:
        raise InputError(str(exc), path) from None
    if a.d > d:
        raise InputError(f"row with {a.d} nonzeros exceeds declared d = {d}", path, 1)
    return a


def write_sparse(a: SparseHermitian, path) -> None:
    out = [f"{a.dim} {a.d} {a.matrix_class.value}"]
    for i, row in enumerate(a.rows):
        for j, v in row:
            if j >= i:
                out.append(f"{i} {j} {v.real!r} {v.imag!r}")
    Path(path).write_text("\n".join(out) + "\n")


def model_from_dict(doc: dict, path=None) -> DegreeModel:
    """``{"weights": [...]}``, ``{"N", "uniform"}`` or ``{"N", "beta", "d", "d_bar"}``."""
    try:
        if "weights" in doc:
            return DegreeModel(np.asarray(doc["weights"], dtype=float), doc.get("beta"))
        if "uniform" in doc:
            return uniform_weights(int(doc["N"]), float(doc["uniform"]))
        return power_law_weights(int(doc["N"]), float(doc["beta"]), float(doc["d"]), float(doc["d_bar"]))
    except KeyError as exc:
        raise InputError(f"missing field {exc}", path) from None


def load_model(path) -> DegreeModel:
    return model_from_dict(_load_json(path), path)
