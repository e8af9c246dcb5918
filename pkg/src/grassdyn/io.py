"""Reading operators, structures and subspaces from JSON or CSV files."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Union

import numpy as np

from .errors import InvalidInputError
from .grassmann import Subspace, orthonormalize
from .jordan import JordanStructure, assemble
from .matrix_core import BlockSpec, as_matrix

PathLike = Union[str, Path]


class ParseError(InvalidInputError):
    """Malformed input text, with a 1-based line and column."""

    def __init__(self, source: str, line: int, column: int, msg: str):
        self.source, self.line, self.column = source, line, column
        super().__init__(f"{source}:{line}:{column}: {msg}")


def _read(path: PathLike) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def loads_json(text: str, source: str = "<string>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(source, exc.lineno, exc.colno, exc.msg) from exc


def _rows_to_matrix(rows, source: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise InvalidInputError(f"{source}: matrix must be a non-empty array of rows")
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise InvalidInputError(f"{source}: row {i + 1} has {len(r)} entries, expected {width}")
        for j, v in enumerate(r):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise InvalidInputError(f"{source}: entry ({i + 1},{j + 1}) is not a number: {v!r}")
    return as_matrix(rows, name=source)


def parse_csv_matrix(text: str, source: str = "<string>") -> np.ndarray:
    rows = []
    for lineno, rec in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not rec or all(not c.strip() for c in rec):
            continue
        row, col = [], 1
        for c in rec:
            try:
                row.append(float(c))
            except ValueError:
                raise ParseError(source, lineno, col, f"not a number: {c.strip()!r}") from None
            col += len(c) + 1
        rows.append(row)
    if not rows:
        raise InvalidInputError(f"{source}: empty matrix")
    return _rows_to_matrix(rows, source)


def parse_matrix(text: str, source: str = "<string>") -> np.ndarray:
    """A JSON array of rows, or CSV when the text does not start with ``[``."""
    if text.lstrip().startswith("["):
        return _rows_to_matrix(loads_json(text, source), source)
    return parse_csv_matrix(text, source)


def load_matrix(path: PathLike) -> np.ndarray:
    return parse_matrix(_read(path), str(path))


def load_operator(path: PathLike):
    """Return ``(T, structure_or_None)``.

    Accepts a bare matrix (JSON or CSV), a JordanStructure object
    ``{"blocks": [...]}``, or a list of BlockSpec objects.
    """
    text = _read(path)
    src = str(path)
    if text.lstrip().startswith(("{", "[")):
        data = loads_json(text, src)
        if isinstance(data, dict):
            if "blocks" in data:
                st = JordanStructure.from_dict(data)
                return st.operator(), st
            if "matrix" in data:
                return _rows_to_matrix(data["matrix"], src), None
            raise InvalidInputError(f"{src}: expected a matrix, or an object with 'blocks' or 'matrix'")
        if data and all(isinstance(b, dict) for b in data):
            blocks = [BlockSpec.from_dict(b) for b in data]
            st = JordanStructure(tuple(blocks))
            return assemble(blocks), st
        return _rows_to_matrix(data, src), None
    return parse_csv_matrix(text, src), None


def load_vectors(path: PathLike) -> np.ndarray:
    """Vectors as rows: a matrix file, or ``{"vectors": [...]}``/``{"frame": [...]}``."""
    text = _read(path)
    src = str(path)
    if text.lstrip().startswith("{"):
        data = loads_json(text, src)
        if "vectors" in data:
            return _rows_to_matrix(data["vectors"], src)
        if "frame" in data:
            return _rows_to_matrix(data["frame"], src).T
        raise InvalidInputError(f"{src}: expected 'vectors' or 'frame'")
    return parse_matrix(text, src)


def load_subspace(path: PathLike) -> Subspace:
    """A subspace file lists spanning vectors as rows (or an explicit ``frame``).

    A coordinate subspace can be given as ``{"ambient_dim": N, "coordinates": [0, 2]}``.
    """
    text = _read(path)
    src = str(path)
    data = loads_json(text, src) if text.lstrip().startswith("{") else None
    if isinstance(data, dict) and "coordinates" in data:
        return Subspace.coordinate(int(data["ambient_dim"]), data["coordinates"])
    if isinstance(data, dict) and "frame" in data:
        return Subspace(_rows_to_matrix(data["frame"], src))
    vecs = load_vectors(path)
    return Subspace(orthonormalize(vecs.T))


def subspace_to_dict(S: Subspace) -> dict:
    return {"ambient_dim": S.ambient_dim, "dim": S.dim, "frame": S.to_list()}


def dump_json(obj, path: PathLike) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_trace_csv(path: PathLike, trace) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "distance"])
        for k, d in enumerate(trace):
            w.writerow([k, repr(float(d))])
