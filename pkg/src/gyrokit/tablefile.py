"""Cayley table files.

Plain text (canonical)::

    gyrotable v1 n=4
    # name: Z4
    # provenance: cyclic group adapter
    0 1 2 3
    1 2 3 0
    2 3 0 1
    3 0 1 2

Row a lists a + 0, a + 1, ...; index 0 is the identity.  Lines starting
with ``#`` are comments, and ``# key: value`` comments after the header are
kept as metadata.
The JSON mirror is ``{"format": "gyrotable", "version": 1, "n": 4,
"rows": [[...], ...], "meta": {...}}``.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .carriers import MalformedTable

VERSION = 1
_HEADER = re.compile(r"^gyrotable\s+v(\d+)\s+n=(\d+)\s*$")
_META = re.compile(r"^#\s*([A-Za-z_][\w-]*)\s*:\s*(.*?)\s*$")


class TableParseError(MalformedTable):
    def __init__(self, message, line=None, col=None, source="<table>"):
        self.line, self.col, self.source = line, col, source
        where = source
        if line is not None:
            where += f":{line}"
            if col is not None:
                where += f":{col}"
        super().__init__(f"{where}: {message}")


def parse_text(text: str, source: str = "<table>"):
    """Parse the plain-text format; returns ``(table, meta)``."""
    lines = text.splitlines()
    header_at = None
    meta = {}
    for i, raw in enumerate(lines, start=1):
        s = raw.strip()
        if not s:
            continue
        if header_at is None:
            if s.startswith("#"):
                continue
            m = _HEADER.match(s)
            if not m:
                raise TableParseError("expected header 'gyrotable v1 n=<order>'", i, 1, source)
            if int(m.group(1)) != VERSION:
                raise TableParseError(f"unsupported version v{m.group(1)}", i, s.index("v") + 1, source)
            n = int(m.group(2))
            if n < 1:
                raise TableParseError("order must be at least 1", i, s.index("n=") + 3, source)
            header_at = i
            rows = []
            continue
        if s.startswith("#"):
            m = _META.match(s)
            if m:
                meta[m.group(1)] = m.group(2)
            continue
        if len(rows) == n:
            raise TableParseError(f"more than {n} rows", i, 1, source)
        row = []
        for m in re.finditer(r"\S+", raw):
            tok, col = m.group(), m.start() + 1
            if not re.fullmatch(r"\d+", tok):
                raise TableParseError(f"entry {tok!r} is not a nonnegative integer", i, col, source)
            v = int(tok)
            if v >= n:
                raise TableParseError(f"entry {v} out of range for order {n}", i, col, source)
            row.append(v)
        if len(row) != n:
            raise TableParseError(f"row has {len(row)} entries, expected {n}", i, len(raw) + 1, source)
        rows.append(row)
    if header_at is None:
        raise TableParseError("empty table file", 1, 1, source)
    if len(rows) != n:
        raise TableParseError(f"expected {n} rows, found {len(rows)}", len(lines) + 1, 1, source)
    return np.array(rows, dtype=np.int64), meta


def parse_json(text: str, source: str = "<table>"):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise TableParseError(e.msg, e.lineno, e.colno, source) from None
    if not isinstance(doc, dict) or doc.get("format") != "gyrotable":
        raise TableParseError("not a gyrotable JSON document", 1, 1, source)
    if doc.get("version") != VERSION:
        raise TableParseError(f"unsupported version {doc.get('version')!r}", 1, 1, source)
    n, rows = doc.get("n"), doc.get("rows")
    if not isinstance(n, int) or n < 1 or not isinstance(rows, list) or len(rows) != n:
        raise TableParseError("'n' and 'rows' disagree", 1, 1, source)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise TableParseError(f"row {i} must have {n} entries", 1, 1, source)
        for j, v in enumerate(row):
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < n:
                raise TableParseError(f"rows[{i}][{j}] = {v!r} is not an index below {n}", 1, 1, source)
    return np.array(rows, dtype=np.int64), dict(doc.get("meta") or {})


def read_table(path):
    """Read a table file in either format; returns ``(table, meta)``."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise TableParseError(str(e.strerror or e), source=str(path)) from None
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        return parse_json(text, str(path))
    return parse_text(text, str(path))


def format_text(table, meta: dict | None = None) -> str:
    t = np.asarray(table)
    n = t.shape[0]
    width = len(str(n - 1))
    out = [f"gyrotable v{VERSION} n={n}"]
    for k, v in (meta or {}).items():
        out.append(f"# {k}: {v}")
    out += [" ".join(f"{int(v):>{width}d}" for v in row) for row in t]
    return "\n".join(out) + "\n"


def format_json(table, meta: dict | None = None) -> str:
    t = np.asarray(table)
    doc = {"format": "gyrotable", "version": VERSION, "n": int(t.shape[0]),
           "rows": t.astype(int).tolist(), "meta": dict(meta or {})}
    return json.dumps(doc, sort_keys=True) + "\n"


def write_table(path, table, meta: dict | None = None) -> None:
    """Write plain text, or the JSON mirror for a ``.json`` path."""
    path = Path(path)
    text = format_json(table, meta) if path.suffix == ".json" else format_text(table, meta)
    path.write_text(text)
