"""Plain-text file formats for matrices, datasets, traces, and manifests.

Matrix files start with a header line "p <dim>" followed by either

    dense
    <p lines of p whitespace-separated decimals>

or

    sparse <nnz>
    <nnz lines "i j value">

with 0-based indices, upper triangle only (i <= j), symmetric completion
implied. Dataset files start with "n <rows> p <cols>" followed by n rows of
p decimals. All floating point values are written with 17 significant
digits so doubles survive a round trip bit for bit; writing, reading back,
and writing again yields byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import os
from typing import Any

import numpy as np

from .datasets import Dataset
from .solver import SolverTrace

TRACE_COLUMNS = ("iter", "f", "delta", "alpha", "free_size", "sweeps", "backtracks", "subgrad", "seconds")


def fmt(x: float) -> str:
    """Decimal form with 17 significant digits (round-trips float64)."""
    return format(float(x), ".17g")


class ParseError(Exception):
    """A matrix, dataset, or trace file does not match its format."""


def write_matrix(path: str, A: np.ndarray, fmt_kind: str = "dense") -> None:
    p = A.shape[0]
    lines = [f"p {p}"]
    if fmt_kind == "dense":
        lines.append("dense")
        for i in range(p):
            lines.append(" ".join(fmt(v) for v in A[i]))
    elif fmt_kind == "sparse":
        iu, ju = np.triu_indices(p)
        vals = A[iu, ju]
        keep = vals != 0.0
        lines.append(f"sparse {int(np.count_nonzero(keep))}")
        for i, j, v in zip(iu[keep], ju[keep], vals[keep]):
            lines.append(f"{i} {j} {fmt(v)}")
    else:
        raise ValueError(f"unknown matrix format {fmt_kind!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix(path: str, return_format: bool = False):
    try:
        with open(path) as fh:
            lines = fh.read().split("\n")
        header = lines[0].split()
        if len(header) != 2 or header[0] != "p":
            raise ParseError(f"{path}: expected header 'p <dim>', got {lines[0]!r}")
        p = int(header[1])
        if p < 1:
            raise ParseError(f"{path}: dimension must be positive")
        kind = lines[1].split()
        if kind[0] == "dense":
            A = np.empty((p, p))
            for i in range(p):
                row = [float(v) for v in lines[2 + i].split()]
                if len(row) != p:
                    raise ParseError(f"{path}: row {i} has {len(row)} values, expected {p}")
                A[i] = row
            fmt_kind = "dense"
        elif kind[0] == "sparse":
            nnz = int(kind[1])
            A = np.zeros((p, p))
            for k in range(nnz):
                i_s, j_s, v_s = lines[2 + k].split()
                i, j, v = int(i_s), int(j_s), float(v_s)
                if not 0 <= i <= j < p:
                    raise ParseError(f"{path}: bad sparse entry ({i}, {j})")
                A[i, j] = v
                A[j, i] = v
            fmt_kind = "sparse"
        else:
            raise ParseError(f"{path}: unknown format line {lines[1]!r}")
    except (ValueError, IndexError) as err:
        raise ParseError(f"{path}: {err}") from err
    return (A, fmt_kind) if return_format else A


def write_dataset(path: str, data: Dataset) -> None:
    lines = [f"n {data.n} p {data.p}"]
    for row in data.Y:
        lines.append(" ".join(fmt(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_dataset(path: str) -> Dataset:
    try:
        with open(path) as fh:
            lines = fh.read().split("\n")
        header = lines[0].split()
        if len(header) != 4 or header[0] != "n" or header[2] != "p":
            raise ParseError(f"{path}: expected header 'n <rows> p <cols>'")
        n, p = int(header[1]), int(header[3])
        Y = np.empty((n, p))
        for i in range(n):
            row = [float(v) for v in lines[1 + i].split()]
            if len(row) != p:
                raise ParseError(f"{path}: row {i} has {len(row)} values, expected {p}")
            Y[i] = row
    except (ValueError, IndexError) as err:
        raise ParseError(f"{path}: {err}") from err
    return Dataset(Y=Y)


def write_trace_csv(path: str, trace: SolverTrace) -> None:
    lines = [",".join(TRACE_COLUMNS)]
    for t in range(len(trace)):
        lines.append(
            ",".join(
                [
                    str(t),
                    fmt(trace.f[t]),
                    fmt(trace.delta[t]),
                    fmt(trace.alpha[t]),
                    str(trace.free_size[t]),
                    str(trace.sweeps[t]),
                    str(trace.backtracks[t]),
                    fmt(trace.subgrad[t]),
                    fmt(trace.seconds[t]),
                ]
            )
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_trace_csv(path: str) -> SolverTrace:
    trace = SolverTrace()
    try:
        with open(path) as fh:
            lines = [ln for ln in fh.read().split("\n") if ln]
        if tuple(lines[0].split(",")) != TRACE_COLUMNS:
            raise ParseError(f"{path}: unexpected trace header {lines[0]!r}")
        for ln in lines[1:]:
            cells = ln.split(",")
            trace.append(
                f=float(cells[1]),
                delta=float(cells[2]),
                alpha=float(cells[3]),
                free_size=int(cells[4]),
                sweeps=int(cells[5]),
                backtracks=int(cells[6]),
                subgrad=float(cells[7]),
                seconds=float(cells[8]),
            )
    except (ValueError, IndexError) as err:
        raise ParseError(f"{path}: {err}") from err
    return trace


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(path: str, manifest: dict[str, Any]) -> None:
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def ensure_dir(path: str) -> None:
    os.makedirs(path, exist_ok=True)
