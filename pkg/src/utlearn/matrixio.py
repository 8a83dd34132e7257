"""Plain-text matrix files and per-iteration trace CSVs.

Matrix file: a ``"<rows> <cols>"`` header line, then one line per row of
space-separated floats in shortest round-trip form, so a write/read cycle
is bit-exact. Trace CSV: header ``iter,objective,err_w,err_z``; error
columns are left empty when no ground truth was available.
"""
from __future__ import annotations

import os
from typing import Iterable

import numpy as np

from .errors import MatrixFormatError
from .learner import IterationRecord, RunTrace

TRACE_HEADER = ("iter", "objective", "err_w", "err_z")


def format_float(x: float) -> str:
    return repr(float(x))


def format_matrix(a) -> str:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {a.shape}")
    lines = [f"{a.shape[0]} {a.shape[1]}"]
    lines.extend(" ".join(map(format_float, row)) for row in a)
    return "\n".join(lines) + "\n"


def write_matrix(path: str | os.PathLike, a) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_matrix(a))


def parse_matrix(text: str, source: str = "<string>") -> np.ndarray:
    lines = text.splitlines()
    if not lines:
        raise MatrixFormatError(f"{source}: line 1: empty file, expected '<rows> <cols>'")
    head = lines[0].split()
    try:
        rows, cols = (int(tok) for tok in head)
    except ValueError:
        raise MatrixFormatError(
            f"{source}: line 1: expected '<rows> <cols>', got {lines[0]!r}"
        ) from None
    if rows < 0 or cols < 0:
        raise MatrixFormatError(f"{source}: line 1: negative dimensions")
    body = lines[1:]
    while len(body) > rows and not body[-1].strip():
        body.pop()
    if len(body) != rows:
        raise MatrixFormatError(
            f"{source}: line {len(body) + 2}: expected {rows} data rows, found {len(body)}"
        )
    out = np.empty((rows, cols))
    for i, line in enumerate(body):
        toks = line.split()
        if len(toks) != cols:
            raise MatrixFormatError(
                f"{source}: line {i + 2}: expected {cols} values, found {len(toks)}"
            )
        try:
            out[i] = [float(tok) for tok in toks]
        except ValueError as exc:
            raise MatrixFormatError(f"{source}: line {i + 2}: {exc}") from None
    return out


def read_matrix(path: str | os.PathLike) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read(), source=str(path))


def _cell(x: float | None) -> str:
    return "" if x is None else format_float(x)


def format_trace(records: Iterable[IterationRecord]) -> str:
    lines = [",".join(TRACE_HEADER)]
    for r in records:
        lines.append(f"{r.t},{format_float(r.objective)},{_cell(r.err_w)},{_cell(r.err_z)}")
    return "\n".join(lines) + "\n"


def write_trace(path: str | os.PathLike, trace: RunTrace) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_trace(trace.records))


def read_trace(path: str | os.PathLike) -> list[IterationRecord]:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or tuple(lines[0].split(",")) != TRACE_HEADER:
        raise MatrixFormatError(f"{path}: line 1: expected header {','.join(TRACE_HEADER)}")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != 4:
            raise MatrixFormatError(f"{path}: line {lineno}: expected 4 fields")
        try:
            t = int(cells[0])
            obj, ew, ez = (float(c) if c else None for c in cells[1:])
        except ValueError as exc:
            raise MatrixFormatError(f"{path}: line {lineno}: {exc}") from None
        records.append(IterationRecord(t=t, objective=obj, err_w=ew, err_z=ez))
    return records
