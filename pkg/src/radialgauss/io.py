"""CSV input/output.

Files are RFC-4180 (CRLF line ends, UTF-8, mandatory header row).  Optional
leading lines starting with ``#`` carry a ``key = value`` provenance block
(the resolved run configuration); readers skip them and return them
separately.  Floats are written with ``repr`` so values round-trip exactly.
"""

from __future__ import annotations

import csv
import io
import math
import os
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import ParseError

__all__ = [
    "format_value",
    "write_table",
    "read_table",
    "write_samples",
    "read_samples",
    "data_section",
]


def format_value(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def _comment_lines(comments) -> List[str]:
    if comments is None:
        return []
    if isinstance(comments, Mapping):
        items = [f"{k} = {v}" for k, v in comments.items()]
    elif isinstance(comments, str):
        items = comments.splitlines()
    else:
        items = list(comments)
    return ["# " + line if line else "#" for line in items]


def write_table(path, header: Sequence[str], rows: Iterable[Sequence], comments=None) -> None:
    """Write ``rows`` under ``header``; ``comments`` become ``#`` lines on top."""
    buf = io.StringIO(newline="")
    for line in _comment_lines(comments):
        buf.write(line + "\r\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    path = os.fspath(path)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def read_table(path) -> Tuple[List[str], List[str], List[List[str]], int]:
    """Return ``(comments, header, rows, first_data_line)``.

    Comment text has the leading ``# `` stripped.  Raises :class:`ParseError`
    (with a 1-based line number) for an empty file, a missing header or a
    row whose width differs from the header.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8 text: {exc}") from None
    lines = text.splitlines(keepends=True)
    comments = []
    k = 0
    while k < len(lines) and lines[k].startswith("#"):
        comments.append(lines[k].rstrip("\r\n")[1:].lstrip(" "))
        k += 1
    if k >= len(lines) or not lines[k].strip():
        raise ParseError("missing header row (file is empty)", k + 1)
    reader = csv.reader(io.StringIO("".join(lines[k:]), newline=""))
    try:
        header = next(reader)
        rows = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"expected {len(header)} fields, found {len(row)}", k + reader.line_num
                )
            rows.append(row)
    except csv.Error as exc:
        raise ParseError(str(exc), k + reader.line_num) from None
    return comments, header, rows, k + 2


def write_samples(path, Z, comments=None, columns: Optional[Sequence[str]] = None) -> None:
    Z = np.asarray(Z, dtype=float)
    if columns is None:
        columns = [f"x{j}" for j in range(Z.shape[1])]
    write_table(path, columns, Z.tolist(), comments)


def read_samples(path) -> Tuple[np.ndarray, List[str]]:
    """Load a numeric sample matrix; every field must parse as a float."""
    comments, header, rows, first = read_table(path)
    if not rows:
        raise ParseError("no data rows after the header", first)
    out = np.empty((len(rows), len(header)))
    for i, row in enumerate(rows):
        try:
            out[i] = [float(v) for v in row]
        except ValueError:
            raise ParseError(f"non-numeric field in {row!r}", first + i) from None
    if not np.all(np.isfinite(out)):
        bad = int(np.argmax(~np.isfinite(out).all(axis=1)))
        raise ParseError("non-finite value", first + bad)
    return out, comments


def data_section(path) -> bytes:
    """Bytes of a CSV file with its ``#`` provenance lines removed."""
    with open(path, "rb") as fh:
        raw = fh.read()
    lines = raw.splitlines(keepends=True)
    return b"".join(line for line in lines if not line.startswith(b"#"))
