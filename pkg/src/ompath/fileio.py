"""Deterministic file emission: atomic writes and fixed-format tables.

Every float that reaches a CSV goes through ``%.17g``, which round-trips
IEEE doubles exactly, so identical runs produce identical bytes and a
file can be read back without drift.  Writes land in a sibling temp file
first and are moved into place with os.replace, so a crash mid-write
never leaves a half-written artifact behind.
"""

from __future__ import annotations

import json
import os
from pathlib import Path as FsPath
from typing import Iterable, Sequence

import numpy as np

__all__ = ["atomic_write_text", "fmt_float", "write_csv", "write_json", "read_csv"]


def fmt_float(x) -> str:
    return "%.17g" % float(x)


def atomic_write_text(path, text: str) -> None:
    path = FsPath(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
        handle.flush()
        os.fsync(handle.fileno())
    os.replace(tmp, path)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write rows of ints/floats; ints stay ints, floats get 17 digits."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, (int, np.integer)):
                cells.append(str(int(cell)))
            else:
                cells.append(fmt_float(cell))
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_json(path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Read a CSV written by :func:`write_csv`: header plus float matrix."""
    with open(path, "r", encoding="utf-8") as handle:
        header = handle.readline().strip()
        if not header:
            raise ValueError(f"{path}: empty file")
        names = header.split(",")
        data = np.loadtxt(handle, delimiter=",", ndmin=2)
    if data.size and data.shape[1] != len(names):
        raise ValueError(
            f"{path}: header has {len(names)} columns but rows have {data.shape[1]}"
        )
    return names, data
