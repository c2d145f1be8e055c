"""Learning curves and dynamic-interval detection.

A curve is performance vs. training-set size; the interesting regime for
transfer experiments is where performance still grows substantially with
additional data (neither undertrained nor saturated). This module fits

    Perf(x) = b + a / (1 + exp(-k (x - x0))),   x = ln(sample_count)

by least squares and takes the dynamic region to be where the derivative
d Perf / d x is at least ``threshold`` times its maximum. For the
logistic this region is analytic: with s the sigmoid, the condition
s(1-s) >= threshold/4 gives boundaries x0 +/- (1/k) * 2 * atanh(sqrt(1-t)).

Fitting is a deterministic multi-start Gauss-Newton: starts on a fixed
5x5 grid with x0 at 5 equispaced points over the observed x range and k
at {1, 3, 9, 27, 81} / (x range); per start, (a, b) are initialized by
linear least squares, then all four parameters are refined jointly with
step-halving. Best final residual wins, ties resolved by grid order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import FitDivergedError, InsufficientCurveError, NoDynamicRegionError
from .records import LanguageId, PerformanceRecord

MIN_CURVE_POINTS = 4
_FLAT_A_TOL = 1e-8
_MAX_ITER = 100
_BOUNDARY_SLACK = 1e-9  # relative slack for containment comparisons


@dataclass
class LearningCurve:
    """Seed-mean performance at strictly increasing sample counts."""

    language: LanguageId
    points: list[tuple[int, float]]
    seed_counts: list[int]

    @property
    def sizes(self) -> list[int]:
        return [size for size, _ in self.points]

    @property
    def perfs(self) -> list[float]:
        return [perf for _, perf in self.points]


@dataclass
class LogisticFit:
    a: float
    b: float
    k: float
    x0: float
    residual_norm: float

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.b + self.a * _sigmoid(self.k * (np.asarray(x) - self.x0))


@dataclass
class DynamicInterval:
    """Chosen [N, 2N] window together with the fitted region it sits in."""

    language: LanguageId
    n_low: int
    n_high: int
    x_left: float
    x_right: float
    fit: LogisticFit

    def to_json(self) -> str:
        doc = {
            "language": self.language.code,
            "n_low": self.n_low,
            "n_high": self.n_high,
            "x_left": self.x_left,
            "x_right": self.x_right,
            "fit": {
                "a": self.fit.a,
                "b": self.fit.b,
                "k": self.fit.k,
                "x0": self.fit.x0,
                "residual": self.fit.residual_norm,
            },
        }
        return json.dumps(doc, indent=2) + "\n"


def build_curve(records: Sequence[PerformanceRecord]) -> LearningCurve:
    """Group one language's records by sample count into a curve.

    Values at the same sample count are averaged (in seed order, so the
    result is independent of record order). Requires at least 4 distinct
    sample counts.
    """
    if not records:
        raise InsufficientCurveError("no records")
    targets = {r.target for r in records}
    if len(targets) > 1:
        raise InsufficientCurveError(
            f"curve records must share one target language, got {sorted(targets)}"
        )
    grouped: dict[int, list[tuple[int, float]]] = {}
    for r in records:
        grouped.setdefault(r.sample_count, []).append((r.seed, r.value))
    if len(grouped) < MIN_CURVE_POINTS:
        raise InsufficientCurveError(
            f"insufficient curve support: {len(grouped)} distinct sample counts, "
            f"need {MIN_CURVE_POINTS}"
        )
    points = []
    seed_counts = []
    for size in sorted(grouped):
        values = [v for _, v in sorted(grouped[size])]
        points.append((size, sum(values) / len(values)))
        seed_counts.append(len(values))
    return LearningCurve(language=LanguageId(code=targets.pop()), points=points,
                         seed_counts=seed_counts)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _gauss_newton(x: np.ndarray, y: np.ndarray, k0: float, x00: float
                  ) -> tuple[np.ndarray, float]:
    """Refine (a, b, k, x0) from one start; returns (params, SSE)."""
    s = _sigmoid(k0 * (x - x00))
    design = np.column_stack([s, np.ones_like(x)])
    ab, *_ = np.linalg.lstsq(design, y, rcond=None)
    theta = np.array([ab[0], ab[1], k0, x00])

    def residual(t: np.ndarray) -> np.ndarray:
        return y - (t[1] + t[0] * _sigmoid(t[2] * (x - t[3])))

    r = residual(theta)
    sse = float(r @ r)
    for _ in range(_MAX_ITER):
        a, _, k, x0 = theta
        sig = _sigmoid(k * (x - x0))
        ds = sig * (1.0 - sig)
        jac = np.column_stack([sig, np.ones_like(x), a * ds * (x - x0), -a * k * ds])
        delta, *_ = np.linalg.lstsq(jac, r, rcond=None)
        if not np.all(np.isfinite(delta)):
            break
        step = 1.0
        improved = False
        for _ in range(30):
            candidate = theta + step * delta
            rc = residual(candidate)
            sse_c = float(rc @ rc)
            if sse_c < sse:
                theta, r, new_sse = candidate, rc, sse_c
                improved = True
                break
            step *= 0.5
        if not improved:
            break
        converged = sse - new_sse <= 1e-15 * max(1.0, sse)
        sse = new_sse
        if converged or float(np.linalg.norm(step * delta)) <= 1e-13:
            break
    return theta, sse


def fit_logistic(sizes: Sequence[int], perfs: Sequence[float]) -> LogisticFit:
    """Least-squares logistic fit over x = ln(size), canonicalized to k > 0."""
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.asarray(perfs, dtype=float)
    width = float(x.max() - x.min())
    x0_grid = np.linspace(x.min(), x.max(), 5)
    k_grid = [3.0**j / width for j in range(5)]

    best_theta = None
    best_sse = math.inf
    for k0 in k_grid:
        for x00 in x0_grid:
            theta, sse = _gauss_newton(x, y, k0, x00)
            if np.all(np.isfinite(theta)) and sse < best_sse:
                best_theta, best_sse = theta, sse

    a, b, k, x0 = best_theta
    if k < 0:  # same model with mirrored sigmoid; normalize
        a, b, k = -a, a + b, -k
    return LogisticFit(a=float(a), b=float(b), k=float(k), x0=float(x0),
                       residual_norm=math.sqrt(best_sse))


def detect_dynamic_interval(curve: LearningCurve, threshold: float = 0.5
                            ) -> DynamicInterval:
    """Find the [N, 2N] window inside the relative-derivative region.

    Returns the smallest observed sample count n_low with
    ln(n_low) >= x_left and 2*n_low <= exp(x_right). Raises
    NoDynamicRegionError when the fit is flat, the threshold leaves no
    interior, or no observed size satisfies the containment; raises
    FitDivergedError when the residual norm exceeds half the observed
    performance range.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must be in (0, 1]")
    fit = fit_logistic(curve.sizes, curve.perfs)

    perf_range = max(curve.perfs) - min(curve.perfs)
    if fit.residual_norm > 0.5 * perf_range:
        raise FitDivergedError(
            f"residual norm {fit.residual_norm:.6g} exceeds 50% of curve range "
            f"{perf_range:.6g}"
        )
    if fit.a <= _FLAT_A_TOL:
        raise NoDynamicRegionError(
            f"fit is degenerate (amplitude {fit.a:.3g}); curve has no growth region"
        )
    if threshold == 1.0:
        raise NoDynamicRegionError(
            "threshold 1 leaves a single-point region (derivative max)"
        )

    half_width = 2.0 * math.atanh(math.sqrt(1.0 - threshold)) / fit.k
    x_left = fit.x0 - half_width
    x_right = fit.x0 + half_width

    upper = math.exp(x_right)
    n_low = None
    for size in curve.sizes:
        if math.log(size) >= x_left - _BOUNDARY_SLACK and \
                2 * size <= upper * (1.0 + _BOUNDARY_SLACK):
            n_low = size
            break
    if n_low is None:
        raise NoDynamicRegionError(
            f"no observed sample count fits [N, 2N] inside "
            f"[{math.exp(x_left):.1f}, {upper:.1f}]"
        )
    return DynamicInterval(language=curve.language, n_low=n_low, n_high=2 * n_low,
                           x_left=x_left, x_right=x_right, fit=fit)
