"""CSV input/output.

One unambiguous dialect everywhere: comma separator, '.' decimal, UTF-8.
Matrices are dense p x p blocks without a header; spectra are a single
line; datasets are one observation per row with an optional header row
that is auto-detected (any non-numeric field in the first row).
"""

from __future__ import annotations

import io as _io
import os

import numpy as np

from .errors import DomainError

_FMT = "%.17g"


def write_matrix_csv(path: str | os.PathLike, matrix: np.ndarray) -> None:
    np.savetxt(path, np.atleast_2d(matrix), delimiter=",", fmt=_FMT)


def read_matrix_csv(path: str | os.PathLike) -> np.ndarray:
    arr = np.loadtxt(path, delimiter=",", ndmin=2)
    if arr.shape[0] != arr.shape[1]:
        raise DomainError(f"matrix file {path!s} is {arr.shape[0]}x{arr.shape[1]}, expected square")
    return arr


def write_spectrum_csv(path: str | os.PathLike, values) -> None:
    line = ",".join(_FMT % v for v in np.asarray(values, dtype=float).ravel())
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(line + "\n")


def read_spectrum_csv(path: str | os.PathLike) -> np.ndarray:
    arr = np.loadtxt(path, delimiter=",")
    return np.atleast_1d(arr.ravel())


def _looks_numeric(line: str) -> bool:
    fields = [f.strip() for f in line.split(",")]
    try:
        for f in fields:
            float(f)
    except ValueError:
        return False
    return bool(fields)


def read_dataset_csv(path: str | os.PathLike) -> np.ndarray:
    """Observations-by-variables matrix; a non-numeric first row is skipped."""
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if not first.strip():
            raise DomainError(f"dataset file {path!s} is empty")
        skip = 0 if _looks_numeric(first) else 1
    arr = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)
    return arr


def write_dataset_csv(path: str | os.PathLike, rows: np.ndarray, header: list[str] | None = None) -> None:
    head = ",".join(header) if header else ""
    np.savetxt(path, np.atleast_2d(rows), delimiter=",", fmt=_FMT, header=head, comments="")


def dataset_csv_bytes(rows: np.ndarray) -> bytes:
    buf = _io.BytesIO()
    np.savetxt(buf, np.atleast_2d(rows), delimiter=",", fmt=_FMT)
    return buf.getvalue()
