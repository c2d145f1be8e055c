"""Downstream evaluation machinery: classification and verification metrics.

macro-F1 averages per-class F1 over the declared label set, with the
zero-division convention F1 = 0 for classes whose precision + recall is
zero (including classes absent from both truths and predictions).

AUC is the Mann-Whitney rank statistic with midrank tie handling:
(#(pos > neg) + 0.5 * #(pos = neg)) / (#pos * #neg).

Verification trials follow a gender-controlled protocol: positives are all
unordered same-speaker pairs, negatives are unordered cross-speaker pairs
restricted to matching gender tokens. Pair lists are sorted by id pair and
any subsampling uses the package's documented SplitMix64 streams, so trial
fixtures are reproducible bit-for-bit.

Utterance embeddings for scoring: average the last k hidden-layer frame
matrices, mean-pool over time, L2-normalize; similarity is the cosine.

File formats: embeddings as JSON-lines
``{id, speaker_id, gender, language, vector: [...] | vectors: [[...]]}``
(``vectors`` rows are frames, pooled on load); trial lists as CSV
``utt_a,utt_b,label`` with labels ``same-speaker`` / ``different-speaker``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import NoNegativesError, NoPositivesError, RecordParseError, ZeroNormError
from .rng import SplitMix64, derive_key, sample_indices

SAME_SPEAKER = "same-speaker"
DIFFERENT_SPEAKER = "different-speaker"
TRIAL_CSV_HEADER = ["utt_a", "utt_b", "label"]


@dataclass(frozen=True)
class LabeledPrediction:
    true_label: str
    predicted_label: str


@dataclass
class Utterance:
    id: str
    speaker_id: str
    gender: str
    language: str
    embedding: Optional[np.ndarray] = None


@dataclass(frozen=True)
class TrialPair:
    utt_a: str
    utt_b: str
    label: str

    def __post_init__(self):
        if self.utt_a == self.utt_b:
            raise ValueError("trial pair must use two distinct utterances")
        if self.label not in (SAME_SPEAKER, DIFFERENT_SPEAKER):
            raise ValueError(f"unknown trial label {self.label!r}")


def macro_f1(predictions: Sequence[LabeledPrediction], labels: Sequence[str]) -> float:
    """Unweighted mean of per-class F1 over the declared label set."""
    if not predictions:
        raise ValueError("empty predictions")
    label_set = list(dict.fromkeys(labels))
    if not label_set:
        raise ValueError("empty label set")
    known = set(label_set)
    for p in predictions:
        if p.true_label not in known:
            raise ValueError(f"unknown true label {p.true_label!r}")
        if p.predicted_label not in known:
            raise ValueError(f"unknown predicted label {p.predicted_label!r}")

    total = 0.0
    for cls in label_set:
        tp = sum(1 for p in predictions
                 if p.true_label == cls and p.predicted_label == cls)
        fp = sum(1 for p in predictions
                 if p.true_label != cls and p.predicted_label == cls)
        fn = sum(1 for p in predictions
                 if p.true_label == cls and p.predicted_label != cls)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        if precision + recall > 0:
            total += 2.0 * precision * recall / (precision + recall)
    return total / len(label_set)


def roc_auc(scored: Iterable[tuple[float, bool]]) -> float:
    """Probability a positive outscores a negative, ties half-credited.

    Computed from midranks, which is exact: rank sums over ties equal the
    pairwise count plus half the tied pairs.
    """
    pairs = list(scored)
    scores = np.array([s for s, _ in pairs], dtype=float)
    positive = np.array([bool(lab) for _, lab in pairs])
    n_pos = int(positive.sum())
    n_neg = len(pairs) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs at least one positive and one negative score")

    order = np.argsort(scores, kind="stable")
    ranks = np.empty(len(scores))
    sorted_scores = scores[order]
    i = 0
    while i < len(sorted_scores):
        j = i
        while j + 1 < len(sorted_scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0  # midrank, 1-based
        i = j + 1
    rank_sum = float(ranks[positive].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def make_sv_trials(utterances: Sequence[Utterance],
                   max_per_class: Optional[int] = None,
                   rng_seed: int = 0) -> list[TrialPair]:
    """Enumerate gender-controlled verification trials.

    Positives and negatives are each emitted sorted by (utt_a, utt_b); a
    cap subsamples each class uniformly with a stream derived from
    (rng_seed, class tag).
    """
    if len(utterances) < 2:
        raise ValueError("need at least 2 utterances")
    if max_per_class is not None and max_per_class <= 0:
        raise ValueError("max_per_class must be positive")
    ids = [u.id for u in utterances]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate utterance ids")
    for u in utterances:
        if not u.speaker_id or not u.gender:
            raise ValueError(f"utterance {u.id!r} missing speaker_id or gender")

    ordered = sorted(utterances, key=lambda u: u.id)
    positives: list[TrialPair] = []
    negatives: list[TrialPair] = []
    for idx, ua in enumerate(ordered):
        for ub in ordered[idx + 1:]:
            if ua.speaker_id == ub.speaker_id:
                positives.append(TrialPair(ua.id, ub.id, SAME_SPEAKER))
            elif ua.gender == ub.gender:
                negatives.append(TrialPair(ua.id, ub.id, DIFFERENT_SPEAKER))
    if not positives:
        raise NoPositivesError("no speaker has two or more utterances")
    if not negatives:
        raise NoNegativesError("no same-gender cross-speaker pair exists")

    if max_per_class is not None:
        positives = _subsample(positives, max_per_class, rng_seed, "pos")
        negatives = _subsample(negatives, max_per_class, rng_seed, "neg")
    return positives + negatives


def _subsample(pairs: list[TrialPair], cap: int, rng_seed: int, tag: str
               ) -> list[TrialPair]:
    if len(pairs) <= cap:
        return pairs
    stream = SplitMix64(derive_key(rng_seed, tag))
    return [pairs[i] for i in sample_indices(len(pairs), cap, stream)]


def embed_utterance(layers: Sequence[np.ndarray], last_k: int = 1) -> np.ndarray:
    """Pool per-layer frame matrices into one unit-norm utterance vector.

    Averages the last ``last_k`` layers elementwise, then the time axis,
    then L2-normalizes.
    """
    if not layers:
        raise ValueError("need at least one layer")
    if not 1 <= last_k <= len(layers):
        raise ValueError(f"last_k must be in [1, {len(layers)}]")
    mats = [np.atleast_2d(np.asarray(layer, dtype=float)) for layer in layers]
    shape = mats[0].shape
    if shape[0] < 1:
        raise ValueError("need at least one frame")
    if any(m.shape != shape for m in mats):
        raise ValueError("layer frame matrices must share one shape")
    stacked = np.mean(mats[-last_k:], axis=0)
    pooled = stacked.mean(axis=0)
    norm = float(np.linalg.norm(pooled))
    if norm < 1e-12:
        raise ZeroNormError("pooled embedding has zero norm")
    return pooled / norm


def cosine_score(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity between two embedding vectors."""
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na < 1e-12 or nb < 1e-12:
        raise ZeroNormError("cannot score a zero-norm embedding")
    return float(np.dot(a, b) / (na * nb))


def score_trials(trials: Sequence[TrialPair],
                 embeddings: dict[str, np.ndarray]) -> list[float]:
    """Cosine-score each trial pair against an id -> embedding map."""
    scores = []
    for trial in trials:
        for utt in (trial.utt_a, trial.utt_b):
            if utt not in embeddings:
                raise KeyError(f"no embedding for utterance {utt!r}")
        scores.append(cosine_score(embeddings[trial.utt_a], embeddings[trial.utt_b]))
    return scores


def trials_auc(trials: Sequence[TrialPair], scores: Sequence[float]) -> float:
    """AUC of trial scores with same-speaker as the positive class."""
    return roc_auc((s, t.label == SAME_SPEAKER) for t, s in zip(trials, scores))


def centroid_distances(embeddings_by_language: dict[str, list[np.ndarray]]
                       ) -> dict[tuple[str, str], float]:
    """Euclidean distances between per-language mean embeddings.

    Keys are unordered pairs as sorted (code, code) tuples.
    """
    if not embeddings_by_language:
        raise ValueError("empty language set")
    centroids: dict[str, np.ndarray] = {}
    dim = None
    for code in sorted(embeddings_by_language):
        vectors = [np.asarray(v, dtype=float) for v in embeddings_by_language[code]]
        if not vectors:
            raise ValueError(f"language {code!r} has no embeddings")
        if dim is None:
            dim = vectors[0].shape
        if any(v.shape != dim for v in vectors):
            raise ValueError("embedding dimension mismatch")
        centroids[code] = np.mean(vectors, axis=0)
    codes = sorted(centroids)
    out: dict[tuple[str, str], float] = {}
    for i, a in enumerate(codes):
        for b in codes[i + 1:]:
            out[(a, b)] = float(np.linalg.norm(centroids[a] - centroids[b]))
    return out


# --- file IO -------------------------------------------------------------------


def read_embeddings_jsonl(content: str) -> list[Utterance]:
    """Parse the embeddings JSON-lines file; frame matrices are pooled."""
    utterances: list[Utterance] = []
    for idx, line in enumerate(content.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordParseError(idx, f"invalid JSON: {exc}") from exc
        missing = [k for k in ("id", "speaker_id", "gender", "language") if k not in obj]
        if missing:
            raise RecordParseError(idx, f"missing fields: {', '.join(missing)}")
        embedding = None
        if obj.get("vectors") is not None:
            embedding = embed_utterance([np.asarray(obj["vectors"], dtype=float)])
        elif obj.get("vector") is not None:
            vec = np.asarray(obj["vector"], dtype=float)
            norm = float(np.linalg.norm(vec))
            if norm < 1e-12:
                raise RecordParseError(idx, "zero-norm embedding vector")
            embedding = vec / norm
        utterances.append(Utterance(id=obj["id"], speaker_id=obj["speaker_id"],
                                    gender=obj["gender"], language=obj["language"],
                                    embedding=embedding))
    return utterances


def trials_to_csv(trials: Sequence[TrialPair]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRIAL_CSV_HEADER)
    for t in trials:
        writer.writerow([t.utt_a, t.utt_b, t.label])
    return buf.getvalue()


def trials_from_csv(content: str) -> list[TrialPair]:
    rows = [row for row in csv.reader(io.StringIO(content)) if row]
    if not rows or rows[0] != TRIAL_CSV_HEADER:
        raise RecordParseError(1, f"expected header {','.join(TRIAL_CSV_HEADER)!r}")
    trials = []
    for idx, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise RecordParseError(idx, f"expected 3 fields, got {len(row)}")
        try:
            trials.append(TrialPair(utt_a=row[0], utt_b=row[1], label=row[2]))
        except ValueError as exc:
            raise RecordParseError(idx, str(exc)) from exc
    return trials
