"""Reading and writing matrices as plain text or JSON.

Text format::

    n
    a11 a12 ... a1n
    ...
    an1 an2 ... ann

JSON format: ``{"n": n, "rows": [[...], ...]}``.  Values are written with
17 significant digits so that a write/read cycle reproduces every double.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import as_matrix
from .exceptions import MatrixFormatError


def _parse_value(tok: str, i: int, j: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise MatrixFormatError(f"row {i + 1}, column {j + 1}: cannot parse {tok!r}") from None
    if not np.isfinite(v):
        raise MatrixFormatError(f"row {i + 1}, column {j + 1}: non-finite value {tok!r}")
    if v < 0:
        raise MatrixFormatError(f"row {i + 1}, column {j + 1}: negative value {tok}")
    return v


def _check_rows(rows, n: int) -> np.ndarray:
    if len(rows) != n:
        raise MatrixFormatError(f"expected {n} rows, got {len(rows)}")
    out = np.empty((n, n))
    for i, row in enumerate(rows):
        if len(row) != n:
            raise MatrixFormatError(f"row {i + 1}: expected {n} values, got {len(row)}")
        for j, tok in enumerate(row):
            out[i, j] = _parse_value(tok, i, j)
    return as_matrix(out)


def _parse_n(tok, where: str = "header") -> int:
    try:
        n = int(tok)
    except (TypeError, ValueError):
        raise MatrixFormatError(f"{where}: dimension must be an integer, got {tok!r}") from None
    if isinstance(tok, float) or n < 1:
        raise MatrixFormatError(f"{where}: dimension must be a positive integer, got {tok!r}")
    return n


def loads_text(text: str) -> np.ndarray:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise MatrixFormatError("empty matrix file")
    n = _parse_n(lines[0], "line 1")
    return _check_rows([ln.split() for ln in lines[1:]], n)


def loads_json(text: str) -> np.ndarray:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or "rows" not in obj:
        raise MatrixFormatError("JSON matrix must be an object with fields 'n' and 'rows'")
    rows = obj["rows"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise MatrixFormatError("'rows' must be an array of arrays")
    n = _parse_n(obj.get("n", len(rows)), "field 'n'")
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise MatrixFormatError(f"row {i + 1}, column {j + 1}: not a number: {v!r}")
    return _check_rows(rows, n)


def loads(text: str) -> np.ndarray:
    """Parse either format, sniffing JSON by a leading ``{``."""
    if text.lstrip().startswith("{"):
        return loads_json(text)
    return loads_text(text)


def load(path) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MatrixFormatError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)


def format_value(v: float) -> str:
    return f"{float(v):.17g}"


def dumps_text(A) -> str:
    A = as_matrix(A, copy=False)
    lines = [str(A.shape[0])]
    lines += [" ".join(format_value(v) for v in row) for row in A]
    return "\n".join(lines) + "\n"


def dumps_json(A) -> str:
    A = as_matrix(A, copy=False)
    rows = ", ".join("[" + ", ".join(format_value(v) for v in row) + "]" for row in A)
    return f'{{"n": {A.shape[0]}, "rows": [{rows}]}}\n'


def dump(A, path, fmt: str | None = None) -> None:
    path = Path(path)
    if fmt is None:
        fmt = "json" if path.suffix.lower() == ".json" else "text"
    path.write_text(dumps_json(A) if fmt == "json" else dumps_text(A))


def pretty(A) -> str:
    """Space-aligned layout for terminal output."""
    A = as_matrix(A, copy=False)
    cells = [[f"{v:g}" for v in row] for row in A]
    width = max(len(c) for row in cells for c in row)
    return "\n".join(" ".join(c.rjust(width) for c in row) for row in cells)
