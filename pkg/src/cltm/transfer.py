"""Self-gains, cross-gains, and the row-normalized transfer matrix.

The self-gain of target i is the performance change from doubling its own
training data; the cross-gain from donor j is the change from adding the
same amount of donor data instead. Each matrix row divides the target's
cross-gains by its self-gain, so entries read as "donor data was worth
this fraction of the same amount of target data" (diagonal fixed at 1).
Rows whose self-gain is not strictly positive are undefined.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import GridError, InvalidDenominatorError
from .records import Condition, TransferGrid


@dataclass
class GainMatrix:
    """Seed-mean self-gains (vector) and cross-gains (matrix, NaN diagonal)."""

    languages: list[str]
    self_gain: np.ndarray
    cross_gain: np.ndarray


@dataclass
class Cltm:
    """Row-normalized transfer matrix with per-row validity flags.

    Invalid rows (non-positive self-gain) hold NaN and are excluded from
    downstream diagnostics.
    """

    languages: list[str]
    entries: np.ndarray
    row_valid: np.ndarray

    @property
    def n(self) -> int:
        return len(self.languages)

    def valid_submatrix(self) -> tuple[np.ndarray, list[str]]:
        """Principal submatrix over valid rows, plus its language codes."""
        idx = np.flatnonzero(self.row_valid)
        codes = [self.languages[i] for i in idx]
        return self.entries[np.ix_(idx, idx)], codes

    def excluded_languages(self) -> list[str]:
        return [code for code, ok in zip(self.languages, self.row_valid) if not ok]


def compute_gains(grid: TransferGrid) -> GainMatrix:
    """Self- and cross-gains from the grid's seed-mean performances."""
    codes = grid.codes
    n = len(codes)
    self_gain = np.empty(n)
    cross_gain = np.full((n, n), np.nan)
    for i, target in enumerate(codes):
        base = grid.mean(target, Condition.BASE)
        self_gain[i] = grid.mean(target, Condition.SELF_AUGMENTED) - base
        for j, donor in enumerate(codes):
            if i == j:
                continue
            cross_gain[i, j] = grid.mean(target, Condition.DONOR_AUGMENTED, donor) - base
    return GainMatrix(languages=list(codes), self_gain=self_gain, cross_gain=cross_gain)


def assemble_cltm(gains: GainMatrix, strict: bool = True) -> Cltm:
    """Divide each row of cross-gains by its self-gain.

    strict=True aborts on the first non-positive self-gain; strict=False
    marks that row invalid (NaN entries) instead.
    """
    n = len(gains.languages)
    entries = np.full((n, n), np.nan)
    row_valid = np.zeros(n, dtype=bool)
    for i in range(n):
        denom = gains.self_gain[i]
        if denom <= 0:
            if strict:
                raise InvalidDenominatorError(gains.languages[i], float(denom))
            continue
        row_valid[i] = True
        entries[i, :] = gains.cross_gain[i, :] / denom
        entries[i, i] = 1.0
    return Cltm(languages=list(gains.languages), entries=entries, row_valid=row_valid)


# --- matrix serialization -----------------------------------------------------


def cltm_to_json(cltm: Cltm) -> str:
    """JSON form {languages, matrix, row_valid}; NaN serialized as null."""
    matrix = [[None if math.isnan(v) else v for v in row] for row in cltm.entries.tolist()]
    doc = {
        "languages": cltm.languages,
        "matrix": matrix,
        "row_valid": [bool(v) for v in cltm.row_valid],
    }
    return json.dumps(doc, indent=2) + "\n"


def cltm_from_json(text: str) -> Cltm:
    doc = json.loads(text)
    try:
        languages = list(doc["languages"])
        matrix = doc["matrix"]
        row_valid = doc.get("row_valid")
    except (KeyError, TypeError) as exc:
        raise GridError(f"malformed matrix JSON: {exc}") from exc
    n = len(languages)
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise GridError("matrix is not n x n for the language list")
    entries = np.array(
        [[np.nan if v is None else float(v) for v in row] for row in matrix]
    )
    if row_valid is None:
        row_valid = [not np.isnan(entries[i]).any() for i in range(n)]
    return Cltm(languages=languages, entries=entries,
                row_valid=np.array(row_valid, dtype=bool))


def cltm_to_csv(cltm: Cltm) -> str:
    """CSV with language codes as header row and first column."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([""] + cltm.languages)
    for code, row in zip(cltm.languages, cltm.entries):
        writer.writerow([code] + [repr(float(v)) for v in row])
    return buf.getvalue()


def cltm_from_csv(text: str) -> Cltm:
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    if not rows:
        raise GridError("empty matrix CSV")
    languages = rows[0][1:]
    n = len(languages)
    if len(rows) != n + 1:
        raise GridError(f"expected {n} matrix rows, got {len(rows) - 1}")
    entries = np.full((n, n), np.nan)
    for i, row in enumerate(rows[1:]):
        if len(row) != n + 1:
            raise GridError(f"row {i + 2}: expected {n + 1} fields")
        if row[0] != languages[i]:
            raise GridError(f"row {i + 2}: label {row[0]!r} != column label {languages[i]!r}")
        entries[i, :] = [float(v) for v in row[1:]]
    row_valid = np.array([not np.isnan(entries[i]).any() for i in range(n)])
    return Cltm(languages=languages, entries=entries, row_valid=row_valid)
