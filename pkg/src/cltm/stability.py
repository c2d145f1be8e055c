"""Seed-level reliability of transfer-matrix entries.

Entries are ratios of performance differences, so their seed spread is
assessed on per-seed ratios with paired conditions: for seed s, the
numerator and denominator both use that seed's Base/SelfAugmented/
DonorAugmented values. Seeds whose self-gain is non-positive are dropped
from the whole row (and counted), since the ratio is undefined there.

The self-gain "mean +/- spread" summary is reported across languages (the
distribution of denominators), with an additional across-seed spread since
either reading of a +/- is plausible; both use the n-1 convention.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NoValidSeedsError
from .records import Condition, TransferGrid
from .transfer import Cltm, GainMatrix


@dataclass
class PerSeedSamples:
    """Per-seed matrix-entry ratios keyed by (target, donor) codes."""

    languages: list[str]
    ratios: dict[tuple[str, str], list[float]]
    valid_seeds: dict[str, list[int]]
    valid_seed_counts: np.ndarray


def per_seed_cltm(grid: TransferGrid) -> PerSeedSamples:
    """Recompute every off-diagonal entry separately per seed.

    Raises NoValidSeedsError if some row has no seed with a positive
    self-gain.
    """
    codes = grid.codes
    n = len(codes)
    seeds = grid.seed_ids
    ratios: dict[tuple[str, str], list[float]] = {}
    valid_seeds: dict[str, list[int]] = {}
    counts = np.zeros((n, n), dtype=int)

    for i, target in enumerate(codes):
        base = grid.per_seed(target, Condition.BASE)
        self_aug = grid.per_seed(target, Condition.SELF_AUGMENTED)
        row_seeds = [s for s in seeds if self_aug[s] - base[s] > 0]
        if not row_seeds:
            raise NoValidSeedsError(
                f"every seed of target {target!r} has a non-positive self-gain"
            )
        valid_seeds[target] = row_seeds
        counts[i, :] = len(row_seeds)
        for j, donor in enumerate(codes):
            if i == j:
                continue
            donor_aug = grid.per_seed(target, Condition.DONOR_AUGMENTED, donor)
            ratios[(target, donor)] = [
                (donor_aug[s] - base[s]) / (self_aug[s] - base[s]) for s in row_seeds
            ]
    return PerSeedSamples(languages=list(codes), ratios=ratios,
                          valid_seeds=valid_seeds, valid_seed_counts=counts)


@dataclass
class StabilityReport:
    """Standard errors of matrix entries plus self-gain summaries."""

    languages: list[str]
    per_entry_se: np.ndarray
    median_se: float
    mean_se: float
    rms: float
    self_gain_mean: float
    self_gain_spread: float
    self_gain_seed_spread: float
    valid_seed_counts: np.ndarray
    insufficient_entries: list[tuple[str, str]]

    def to_json(self) -> str:
        doc = {
            "median_se": self.median_se,
            "mean_se": self.mean_se,
            "rms": self.rms,
            "self_gain": {
                "mean": self.self_gain_mean,
                "spread": self.self_gain_spread,
                "seed_spread": self.self_gain_seed_spread,
            },
            "per_entry_se": [
                [None if math.isnan(v) else v for v in row]
                for row in self.per_entry_se.tolist()
            ],
            "languages": self.languages,
            "valid_seed_counts": self.valid_seed_counts.tolist(),
            "insufficient_entries": [list(pair) for pair in self.insufficient_entries],
        }
        return json.dumps(doc, indent=2) + "\n"


def _sample_sd(values: list[float]) -> float:
    mean = sum(values) / len(values)
    return math.sqrt(sum((v - mean) ** 2 for v in values) / (len(values) - 1))


def stability_report(samples: PerSeedSamples, cltm: Cltm,
                     gains: GainMatrix,
                     grid: Optional[TransferGrid] = None) -> StabilityReport:
    """Summarize per-entry standard errors and the self-gain distribution.

    SE per entry = sample sd of the per-seed ratios / sqrt(valid seeds).
    Entries in invalid headline rows, or with fewer than 2 valid seeds,
    are marked undefined and listed. ``grid`` enables the across-seed
    self-gain spread; without it that field is NaN.
    """
    codes = samples.languages
    n = len(codes)
    per_entry_se = np.full((n, n), np.nan)
    insufficient: list[tuple[str, str]] = []
    for i, target in enumerate(codes):
        for j, donor in enumerate(codes):
            if i == j:
                continue
            key = (target, donor)
            values = samples.ratios.get(key, [])
            if not cltm.row_valid[i] or len(values) < 2:
                insufficient.append(key)
                continue
            per_entry_se[i, j] = _sample_sd(values) / math.sqrt(len(values))

    defined = per_entry_se[~np.isnan(per_entry_se)]
    median_se = float(np.median(defined)) if defined.size else float("nan")
    mean_se = float(defined.mean()) if defined.size else float("nan")

    matrix, _ = cltm.valid_submatrix()
    rms = float(np.linalg.norm(matrix) / matrix.shape[0]) if matrix.size else float("nan")

    self_gains = gains.self_gain
    self_gain_mean = float(self_gains.mean())
    self_gain_spread = (
        float(self_gains.std(ddof=1)) if self_gains.size > 1 else float("nan")
    )

    seed_spread = float("nan")
    if grid is not None and len(grid.seed_ids) > 1:
        sds = []
        for target in codes:
            base = grid.per_seed(target, Condition.BASE)
            self_aug = grid.per_seed(target, Condition.SELF_AUGMENTED)
            per_seed = [self_aug[s] - base[s] for s in grid.seed_ids]
            sds.append(_sample_sd(per_seed))
        seed_spread = float(np.mean(sds))

    return StabilityReport(
        languages=list(codes),
        per_entry_se=per_entry_se,
        median_se=median_se,
        mean_se=mean_se,
        rms=rms,
        self_gain_mean=self_gain_mean,
        self_gain_spread=self_gain_spread,
        self_gain_seed_spread=seed_spread,
        valid_seed_counts=samples.valid_seed_counts,
        insufficient_entries=insufficient,
    )
