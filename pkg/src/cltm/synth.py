"""Synthetic multilingual experiments with analytically known transfer.

Each language gets a logistic learning curve over log sample count,

    L(m) = b + a / (1 + exp(-k (ln m - x0))),

and donor effects are planted as effective-data scaling: adding donor j's
N samples moves target i along its own curve to N * (1 + T[i][j]). The
self condition is T = 1 (doubling), so the recovered matrix entry has the
closed form

    G[i][j] = (L_i(N (1 + T[i][j])) - L_i(N)) / (L_i(2N) - L_i(N)),

with G[i][i] = 1 by construction. Negative transfer (T < 0) and
better-than-self transfer (T > 1) both arise naturally.

Record values add per-record Gaussian noise from a stream keyed by
(master_seed, target, condition, donor, seed) via the package's
key-derivation scheme, so generation is deterministic and partitionable.

Two presets ship with the module: "block" (positive transfer inside
language families, negative across, the speaker-verification-like pattern)
and "flat" (all T = 1, the language-agnostic ideal). The block preset's
noise level is tuned so that with its 10 seeds the median per-entry
standard error lands near 0.1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CltmError
from .records import Condition, LanguageId, PerformanceRecord
from .rng import SplitMix64, derive_key

_SATURATION_TOL = 1e-12

# calibrated: median per-entry SE ~= 0.1 at 10 seeds (scripts/calibrate_preset_noise.py)
BLOCK_NOISE_SD = 0.03

_PRESET_LANGUAGES = [
    ("de", "germanic"), ("nl", "germanic"), ("sv", "germanic"),
    ("pt", "romance"), ("es", "romance"), ("it", "romance"),
    ("ru", "slavic"), ("be", "slavic"),
]

_PRESET_CURVES = [
    (0.60, 0.30, 1.60, math.log(140.0)),
    (0.55, 0.32, 1.50, math.log(150.0)),
    (0.58, 0.28, 1.70, math.log(135.0)),
    (0.62, 0.25, 1.40, math.log(145.0)),
    (0.57, 0.31, 1.60, math.log(138.0)),
    (0.59, 0.27, 1.50, math.log(142.0)),
    (0.61, 0.29, 1.70, math.log(148.0)),
    (0.56, 0.30, 1.55, math.log(136.0)),
]


@dataclass(frozen=True)
class CurveParams:
    a: float
    b: float
    k: float
    x0: float

    def value(self, sample_count: float) -> float:
        z = self.k * (math.log(sample_count) - self.x0)
        if z >= 0:
            s = 1.0 / (1.0 + math.exp(-z))
        else:
            ez = math.exp(z)
            s = ez / (1.0 + ez)
        return self.b + self.a * s


@dataclass
class SyntheticTruth:
    """Planted experiment: curves, transfer coefficients, noise model."""

    languages: list[LanguageId]
    curves: list[CurveParams]
    transfer: np.ndarray
    noise_sd: float
    n_samples: int
    seed_count: int
    metric_name: str = field(default="synthetic")

    def validate(self) -> None:
        n = len(self.languages)
        if n < 2:
            raise CltmError("synthetic truth needs at least 2 languages")
        codes = [lang.code for lang in self.languages]
        if len(set(codes)) != n:
            raise CltmError("duplicate language codes in truth")
        if len(self.curves) != n:
            raise CltmError("one curve per language required")
        if self.transfer.shape != (n, n):
            raise CltmError(f"transfer matrix must be {n}x{n}")
        if not np.all(np.diag(self.transfer) == 1.0):
            raise CltmError("transfer diagonal must be exactly 1")
        if np.any(self.transfer <= -1.0):
            raise CltmError("transfer entries must exceed -1")
        if self.noise_sd < 0:
            raise CltmError("noise_sd must be nonnegative")
        if self.n_samples <= 0 or self.seed_count <= 0:
            raise CltmError("n_samples and seed_count must be positive")


def planted_truth(truth: SyntheticTruth) -> np.ndarray:
    """Exact transfer matrix implied by the curves and coefficients."""
    truth.validate()
    n = len(truth.languages)
    big_n = truth.n_samples
    matrix = np.empty((n, n))
    for i, curve in enumerate(truth.curves):
        base = curve.value(big_n)
        self_gain = curve.value(2 * big_n) - base
        if self_gain < _SATURATION_TOL:
            raise CltmError(
                f"curve for {truth.languages[i].code!r} is saturated at N={big_n}"
            )
        for j in range(n):
            if i == j:
                matrix[i, j] = 1.0
            else:
                scaled = big_n * (1.0 + truth.transfer[i, j])
                matrix[i, j] = (curve.value(scaled) - base) / self_gain
    return matrix


def generate_experiment(truth: SyntheticTruth, master_seed: int
                        ) -> list[PerformanceRecord]:
    """Emit one record per (target, condition, donor, seed), deterministically.

    Noiseless values come from the target's curve at the condition's
    effective sample count; noise is one Gaussian draw per record from the
    stream keyed by (master_seed, target, condition, donor, seed).
    """
    truth.validate()
    codes = [lang.code for lang in truth.languages]
    big_n = truth.n_samples
    records: list[PerformanceRecord] = []

    def emit(target_idx: int, condition: Condition, donor_idx: int | None) -> None:
        curve = truth.curves[target_idx]
        target = codes[target_idx]
        donor = None if donor_idx is None else codes[donor_idx]
        if condition is Condition.BASE:
            clean = curve.value(big_n)
            count = big_n
        elif condition is Condition.SELF_AUGMENTED:
            clean = curve.value(2 * big_n)
            count = 2 * big_n
        else:
            scaled = big_n * (1.0 + truth.transfer[target_idx, donor_idx])
            clean = curve.value(scaled)
            count = 2 * big_n
        for seed in range(truth.seed_count):
            value = clean
            if truth.noise_sd > 0:
                stream = SplitMix64(
                    derive_key(master_seed, target, condition.value, donor, seed)
                )
                value += truth.noise_sd * stream.next_gauss()
            records.append(PerformanceRecord(
                target=target, condition=condition, donor=donor, seed=seed,
                value=value, metric_name=truth.metric_name, sample_count=count,
            ))

    for i in range(len(codes)):
        emit(i, Condition.BASE, None)
        emit(i, Condition.SELF_AUGMENTED, None)
        for j in range(len(codes)):
            if i != j:
                emit(i, Condition.DONOR_AUGMENTED, j)
    return records


def _preset_transfer(block: bool) -> np.ndarray:
    n = len(_PRESET_LANGUAGES)
    families = [fam for _, fam in _PRESET_LANGUAGES]
    transfer = np.ones((n, n))
    if not block:
        return transfer
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if families[i] == families[j]:
                transfer[i, j] = 0.55 + 0.05 * ((i + 2 * j) % 5)
            else:
                transfer[i, j] = -0.15 - 0.05 * ((i + 3 * j) % 6)
    return transfer


def preset(name: str) -> SyntheticTruth:
    """Built-in experiment presets: "block" or "flat" (8 languages each)."""
    if name not in ("block", "flat"):
        raise CltmError(f"unknown preset {name!r} (choose 'block' or 'flat')")
    return SyntheticTruth(
        languages=[LanguageId(code=c, family=f) for c, f in _PRESET_LANGUAGES],
        curves=[CurveParams(*params) for params in _PRESET_CURVES],
        transfer=_preset_transfer(block=(name == "block")),
        noise_sd=BLOCK_NOISE_SD,
        n_samples=100,
        seed_count=10,
    )


# --- truth serialization --------------------------------------------------------


def truth_to_json(truth: SyntheticTruth) -> str:
    doc = {
        "languages": [
            {"code": lang.code, "family": lang.family} for lang in truth.languages
        ],
        "curves": [
            {"a": c.a, "b": c.b, "k": c.k, "x0": c.x0} for c in truth.curves
        ],
        "transfer": truth.transfer.tolist(),
        "noise_sd": truth.noise_sd,
        "n_samples": truth.n_samples,
        "seed_count": truth.seed_count,
        "metric": truth.metric_name,
    }
    return json.dumps(doc, indent=2) + "\n"


def truth_from_json(text: str) -> SyntheticTruth:
    doc = json.loads(text)
    try:
        truth = SyntheticTruth(
            languages=[
                LanguageId(code=item["code"], family=item.get("family"))
                for item in doc["languages"]
            ],
            curves=[
                CurveParams(a=c["a"], b=c["b"], k=c["k"], x0=c["x0"])
                for c in doc["curves"]
            ],
            transfer=np.array(doc["transfer"], dtype=float),
            noise_sd=float(doc["noise_sd"]),
            n_samples=int(doc["n_samples"]),
            seed_count=int(doc["seed_count"]),
            metric_name=doc.get("metric", "synthetic"),
        )
    except (KeyError, TypeError) as exc:
        raise CltmError(f"malformed truth JSON: {exc}") from exc
    truth.validate()
    return truth
