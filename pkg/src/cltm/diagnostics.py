"""Aggregate matrix diagnostics: deviation, asymmetry, positivity structure.

All statistics are computed on the principal submatrix of valid rows. The
positive-transfer statistics exclude the diagonal (fixed at 1 by
construction). Statistics whose denominator is empty (no positive entries,
or no family labels) are reported as None, never coerced to 0.

reciprocity uses P(mirror positive | entry positive) by default: the
fraction of positive off-diagonal entries whose transposed entry is also
positive. The alternative "all_pairs" denominator (both-positive over all
off-diagonal pairs) is available via ``reciprocity_denominator``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CltmError, ZeroMatrixError, ZeroRowError
from .transfer import Cltm


@dataclass
class DiagnosticsReport:
    """Aggregate statistics of one transfer matrix (valid rows only)."""

    rfd1: float
    asym_rel: float
    prop_pos: float
    reciprocity_pos: Optional[float]
    avg_row_cosine: float
    intra_family_pos: Optional[float]
    rms: float
    n: int
    excluded_languages: list[str]
    reciprocity_denominator: str = "positive"

    def as_dict(self) -> dict:
        return {
            "rfd1": self.rfd1,
            "asym_rel": self.asym_rel,
            "prop_pos": self.prop_pos,
            "reciprocity_pos": self.reciprocity_pos,
            "avg_row_cosine": self.avg_row_cosine,
            "intra_family_pos": self.intra_family_pos,
            "rms": self.rms,
            "n": self.n,
            "excluded_languages": self.excluded_languages,
            "reciprocity_denominator": self.reciprocity_denominator,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        """Aligned table in the diagnostics row order used for reporting."""
        def pct(v: Optional[float]) -> str:
            return "undefined" if v is None else f"{100.0 * v:.2f}%"

        rows = [
            ("RFD_1", f"{self.rfd1:.3f}"),
            ("Asym_rel", f"{self.asym_rel:.3f}"),
            ("prop_+", pct(self.prop_pos)),
            ("reciprocity_+", pct(self.reciprocity_pos)),
            ("cos_rows", f"{self.avg_row_cosine:.3f}"),
            ("intra-family_+", pct(self.intra_family_pos)),
        ]
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name:<{width}}  {value}" for name, value in rows) + "\n"


def compute_diagnostics(cltm: Cltm, family_map: Optional[dict[str, str]] = None,
                        reciprocity_denominator: str = "positive") -> DiagnosticsReport:
    """Evaluate every aggregate statistic on the valid-row submatrix."""
    if reciprocity_denominator not in ("positive", "all_pairs"):
        raise ValueError(f"unknown reciprocity denominator {reciprocity_denominator!r}")
    matrix, codes = cltm.valid_submatrix()
    n = len(codes)
    if n < 2:
        raise CltmError(f"diagnostics need at least 2 valid rows, have {n}")

    ones = np.ones_like(matrix)
    rfd1 = float(np.linalg.norm(matrix - ones) / n)

    fro = float(np.linalg.norm(matrix))
    if fro == 0.0:  # impossible with a unit diagonal, kept as a guard
        raise ZeroMatrixError("matrix Frobenius norm is zero")
    asym_rel = float(np.linalg.norm(matrix - matrix.T) / fro)

    row_norms = np.linalg.norm(matrix, axis=1)
    if np.any(row_norms == 0.0):  # same guard
        raise ZeroRowError("all-zero matrix row")
    unit_rows = matrix / row_norms[:, None]
    gram = unit_rows @ unit_rows.T
    avg_row_cosine = float((gram.sum() - np.trace(gram)) / (n * (n - 1)))

    rms = float(fro / n)

    off_mask = ~np.eye(n, dtype=bool)
    off_positive = (matrix > 0.0) & off_mask
    prop_pos = float(off_positive.sum() / off_mask.sum())

    n_positive = int(off_positive.sum())
    if reciprocity_denominator == "positive":
        reciprocity_pos = (
            None if n_positive == 0
            else float((off_positive & off_positive.T).sum() / n_positive)
        )
    else:
        reciprocity_pos = float((off_positive & off_positive.T).sum() / off_mask.sum())

    intra_family_pos: Optional[float] = None
    if family_map and n_positive > 0:
        fams = [family_map.get(code) for code in codes]
        same_family = np.array(
            [[fams[i] is not None and fams[i] == fams[j] for j in range(n)]
             for i in range(n)]
        )
        intra_family_pos = float((off_positive & same_family).sum() / n_positive)

    return DiagnosticsReport(
        rfd1=rfd1,
        asym_rel=asym_rel,
        prop_pos=prop_pos,
        reciprocity_pos=reciprocity_pos,
        avg_row_cosine=avg_row_cosine,
        intra_family_pos=intra_family_pos,
        rms=rms,
        n=n,
        excluded_languages=cltm.excluded_languages(),
        reciprocity_denominator=reciprocity_denominator,
    )


@dataclass
class RowProfile:
    language: str
    row: np.ndarray
    mean: float
    positive_fraction: float


def row_profiles(cltm: Cltm) -> list[RowProfile]:
    """Per-target summary of each valid row.

    ``mean`` averages the full row (diagonal included); the positive
    fraction counts off-diagonal entries only.
    """
    profiles = []
    for i, code in enumerate(cltm.languages):
        if not cltm.row_valid[i]:
            continue
        row = cltm.entries[i].copy()
        off = np.delete(row, i)
        positive = float((off > 0).sum() / off.size) if off.size else 0.0
        profiles.append(RowProfile(language=code, row=row,
                                   mean=float(row.mean()), positive_fraction=positive))
    if not profiles:
        raise CltmError("no valid rows to profile")
    return profiles
