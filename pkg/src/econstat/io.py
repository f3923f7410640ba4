"""CSV ingestion/emission and run manifests.

Money leaves the package in money units with exactly two decimals; other
floats are written with ``repr`` so they read back bit-identically.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from .analytics import Sample
from .errors import EmptyData, MalformedRow, MissingColumn

MANIFEST_META_KEYS = ("tool_version", "command", "rng", "started", "finished")


def fmt_money(minor: int) -> str:
    """Exact two-decimal rendering of an integer amount of minor units."""
    minor = int(minor)
    sign = "-" if minor < 0 else ""
    whole, cents = divmod(abs(minor), 100)
    return f"{sign}{whole}.{cents:02d}"


def fmt_float(x) -> str:
    return repr(float(x))


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)
    return path


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def ingest_csv(stream: TextIO | str | Path, value_column: str, weight_column: str | None = None) -> Sample:
    """Read one value column (and optionally a weight column) into a Sample.

    Fails fast on the first non-numeric, non-finite or negative value,
    naming its line number (the header is line 1).
    """
    if isinstance(stream, (str, Path)):
        with Path(stream).open(newline="", encoding="utf-8") as fh:
            return ingest_csv(fh, value_column, weight_column)
    reader = csv.reader(stream)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise EmptyData("CSV has no header row") from None
    for col in (value_column, weight_column):
        if col is not None and col not in header:
            raise MissingColumn(f"column {col!r} not in header {header}")
    vi = header.index(value_column)
    wi = header.index(weight_column) if weight_column else None

    values, weights = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise MalformedRow(f"expected {len(header)} fields, got {len(row)}", line=lineno)
        values.append(_non_negative(row[vi], value_column, lineno))
        if wi is not None:
            w = _non_negative(row[wi], weight_column, lineno)
            if w == 0:
                raise MalformedRow(f"{weight_column} must be positive", line=lineno)
            weights.append(w)
    if not values:
        raise EmptyData("CSV has a header but no data rows")
    return Sample(
        np.asarray(values, dtype=float),
        np.asarray(weights, dtype=float) if wi is not None else None,
        unit=value_column,
    )


def _non_negative(text: str, column: str, lineno: int) -> float:
    try:
        x = float(text)
    except ValueError:
        raise MalformedRow(f"{column}={text!r} is not numeric", line=lineno) from None
    if not math.isfinite(x) or x < 0:
        raise MalformedRow(f"{column}={text!r} must be finite and non-negative", line=lineno)
    return x


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def write_manifest(path, meta: dict, config_lines: Sequence[str], outputs: Sequence[Path]) -> Path:
    lines = ["# econstat run manifest"]
    lines += [f"{k} = {meta[k]}" for k in MANIFEST_META_KEYS if k in meta]
    lines += list(config_lines)
    lines += [f"sha256: {sha256_file(p)} {Path(p).name}" for p in outputs]
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_manifest(path) -> tuple[dict, str, dict]:
    """Split a manifest into ``(meta, config_text, digests)``."""
    meta, config, digests = {}, io.StringIO(), {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if s.startswith("sha256:"):
            _, digest, name = s.split(None, 2)
            digests[name] = digest
            continue
        key, _, value = s.partition("=")
        if key.strip() in MANIFEST_META_KEYS:
            meta[key.strip()] = value.strip()
        else:
            config.write(s + "\n")
    return meta, config.getvalue(), digests
