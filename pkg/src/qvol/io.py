"""Plain-text matrix files and survey CSV."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .entropy import format_q
from .linalg import BipartiteDims
from .survey import SurveyConfig, VolumeEstimate

CSV_HEADER = ("experiment", "n1", "n2", "rank", "q", "predicate", "hits", "samples",
              "fraction", "stderr")


class MatrixFileError(ValueError):
    pass


def read_matrix_file(path) -> tuple[BipartiteDims, np.ndarray]:
    """Parse ``dims N1 N2`` followed by ``row col real imag`` lines.

    Unlisted entries are zero; blank lines and ``#`` comments are ignored.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise MatrixFileError(f"{path}: empty file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "dims":
        raise MatrixFileError(f"{path}: first line must be 'dims N1 N2'")
    try:
        dims = BipartiteDims(int(head[1]), int(head[2]))
    except ValueError as exc:
        raise MatrixFileError(f"{path}: {exc}") from exc
    m = np.zeros((dims.n, dims.n), dtype=np.complex128)
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 4:
            raise MatrixFileError(f"{path}:{lineno}: expected 'row col real imag'")
        try:
            i, j = int(parts[0]), int(parts[1])
            val = complex(float(parts[2]), float(parts[3]))
        except ValueError as exc:
            raise MatrixFileError(f"{path}:{lineno}: {exc}") from exc
        if not (0 <= i < dims.n and 0 <= j < dims.n):
            raise MatrixFileError(f"{path}:{lineno}: index ({i}, {j}) out of range")
        m[i, j] = val
    return dims, m


def write_matrix_file(path, matrix: np.ndarray, dims: BipartiteDims) -> None:
    out = [f"dims {dims.n1} {dims.n2}"]
    for i in range(dims.n):
        for j in range(dims.n):
            z = complex(matrix[i, j])
            if z != 0:
                out.append(f"{i} {j} {z.real!r} {z.imag!r}")
    Path(path).write_text("\n".join(out) + "\n")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def csv_rows(config: SurveyConfig, estimates: list[VolumeEstimate]) -> list[list[str]]:
    return [[config.experiment, str(config.dims.n1), str(config.dims.n2), str(config.rank),
             "" if e.q is None else format_q(e.q), e.predicate, str(e.hits), str(e.samples),
             _fmt(e.fraction), _fmt(e.stderr)] for e in estimates]


def write_csv(stream, results: list[tuple[SurveyConfig, list[VolumeEstimate]]]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for config, estimates in results:
        w.writerows(csv_rows(config, estimates))


def to_csv_text(results) -> str:
    buf = io.StringIO()
    write_csv(buf, results)
    return buf.getvalue()


@dataclass(frozen=True)
class CsvRecord:
    experiment: str
    n1: int
    n2: int
    rank: int
    estimate: VolumeEstimate


def read_csv(path) -> list[CsvRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        out = []
        for row in reader:
            q = None if row["q"] == "" else (math.inf if row["q"] == "inf" else float(row["q"]))
            est = VolumeEstimate(row["predicate"], q, int(row["hits"]), int(row["samples"]))
            out.append(CsvRecord(row["experiment"], int(row["n1"]), int(row["n2"]),
                                 int(row["rank"]), est))
        return out
