"""Classification/verification metrics against exhaustive oracles."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from cltm.errors import NoNegativesError, NoPositivesError, ZeroNormError
from cltm.evalmetrics import (
    DIFFERENT_SPEAKER,
    SAME_SPEAKER,
    LabeledPrediction,
    Utterance,
    centroid_distances,
    cosine_score,
    embed_utterance,
    macro_f1,
    make_sv_trials,
    read_embeddings_jsonl,
    roc_auc,
    score_trials,
    trials_auc,
    trials_from_csv,
    trials_to_csv,
)


def preds(truths, predicted):
    return [LabeledPrediction(t, p) for t, p in zip(truths, predicted)]


class TestMacroF1:
    def test_perfect(self):
        assert macro_f1(preds("MMFF", "MMFF"), ["M", "F"]) == 1.0

    def test_hand_fixture(self):
        # frozen from independent confusion-matrix computation
        value = macro_f1(preds("MMFF", "MFFF"), ["M", "F"])
        assert value == pytest.approx(0.7333333333333334, abs=1e-12)

    def test_total_miss(self):
        assert macro_f1(preds("MM", "FF"), ["M", "F"]) == 0.0

    def test_absent_class_contributes_zero(self):
        value = macro_f1(preds("MM", "MM"), ["M", "F", "X"])
        assert value == pytest.approx(1.0 / 3.0)

    def test_empty_input(self):
        with pytest.raises(ValueError, match="empty"):
            macro_f1([], ["M", "F"])

    def test_unknown_label(self):
        with pytest.raises(ValueError, match="unknown"):
            macro_f1(preds("MZ", "MM"), ["M", "F"])

    @given(st.lists(st.tuples(st.sampled_from("abc"), st.sampled_from("abc")),
                    min_size=1, max_size=40),
           st.randoms(use_true_random=False))
    @settings(max_examples=60)
    def test_rename_and_order_invariance(self, pairs, rng):
        labels = ["a", "b", "c"]
        baseline = macro_f1([LabeledPrediction(t, p) for t, p in pairs], labels)
        shuffled = pairs[:]
        rng.shuffle(shuffled)
        assert macro_f1(
            [LabeledPrediction(t, p) for t, p in shuffled], labels
        ) == pytest.approx(baseline)
        rename = {"a": "x", "b": "y", "c": "z"}
        renamed = macro_f1(
            [LabeledPrediction(rename[t], rename[p]) for t, p in pairs],
            ["x", "y", "z"])
        assert renamed == pytest.approx(baseline)

    @given(st.integers(0, 100_000))
    @settings(max_examples=100, deadline=None)
    def test_oracle_equivalence(self, seed):
        rng = np.random.default_rng(seed)
        size = int(rng.integers(1, 60))
        labels = ["m", "f"]
        truths = [labels[i] for i in rng.integers(0, 2, size)]
        predicted = [labels[i] for i in rng.integers(0, 2, size)]
        ours = macro_f1(preds(truths, predicted), labels)
        assert abs(ours - oracles.bf_macro_f1(truths, predicted, labels)) <= 1e-12


class TestRocAuc:
    def test_perfect(self):
        scored = [(0.9, True), (0.8, True), (0.1, False), (0.2, False)]
        assert roc_auc(scored) == 1.0

    def test_all_ties(self):
        scored = [(0.5, True), (0.5, False), (0.5, True), (0.5, False)]
        assert roc_auc(scored) == 0.5

    def test_hand_fixture(self):
        scored = [(0.8, True), (0.3, True), (0.5, False), (0.1, False)]
        assert roc_auc(scored) == pytest.approx(0.75, abs=1e-15)

    def test_single_class(self):
        with pytest.raises(ValueError, match="positive and"):
            roc_auc([(0.5, True)])

    @given(st.integers(0, 100_000))
    @settings(max_examples=120, deadline=None)
    def test_oracle_equivalence(self, seed):
        rng = np.random.default_rng(seed)
        n_pos = int(rng.integers(1, 20))
        n_neg = int(rng.integers(1, 20))
        # quantized scores force ties
        pos = list(np.round(rng.uniform(0, 1, n_pos), 1))
        neg = list(np.round(rng.uniform(0, 1, n_neg), 1))
        scored = [(s, True) for s in pos] + [(s, False) for s in neg]
        assert abs(roc_auc(scored) - oracles.bf_auc(pos, neg)) <= 1e-12

    @given(st.integers(0, 100_000))
    @settings(max_examples=60, deadline=None)
    def test_monotone_transform_invariance(self, seed):
        rng = np.random.default_rng(seed)
        scored = [(float(s), bool(l)) for s, l in
                  zip(rng.uniform(-2, 2, 20), rng.integers(0, 2, 20))]
        if not any(l for _, l in scored) or all(l for _, l in scored):
            return
        transformed = [(math.exp(2.0 * s) + 1.0, l) for s, l in scored]
        assert roc_auc(transformed) == pytest.approx(roc_auc(scored), abs=1e-12)

    @given(st.integers(0, 100_000))
    @settings(max_examples=60, deadline=None)
    def test_label_flip(self, seed):
        rng = np.random.default_rng(seed)
        scores = rng.permutation(np.linspace(0, 1, 16))  # distinct, no ties
        labels = rng.integers(0, 2, 16)
        if labels.sum() in (0, 16):
            return
        scored = [(float(s), bool(l)) for s, l in zip(scores, labels)]
        flipped = [(s, not l) for s, l in scored]
        assert roc_auc(flipped) == pytest.approx(1.0 - roc_auc(scored), abs=1e-12)


def utt(uid, speaker, gender="m", language="de", embedding=None):
    return Utterance(id=uid, speaker_id=speaker, gender=gender, language=language,
                     embedding=embedding)


class TestTrials:
    def test_two_speakers_two_utts(self):
        utts = [utt("u1", "s1"), utt("u2", "s1"), utt("u3", "s2"), utt("u4", "s2")]
        trials = make_sv_trials(utts)
        positives = [t for t in trials if t.label == SAME_SPEAKER]
        negatives = [t for t in trials if t.label == DIFFERENT_SPEAKER]
        assert len(positives) == 2 and len(negatives) == 4

    def test_three_plus_one(self):
        utts = [utt("u1", "s1"), utt("u2", "s1"), utt("u3", "s1"), utt("u4", "s2")]
        trials = make_sv_trials(utts)
        assert sum(t.label == SAME_SPEAKER for t in trials) == 3
        assert sum(t.label == DIFFERENT_SPEAKER for t in trials) == 3

    def test_no_negatives(self):
        utts = [utt("u1", "s1", "m"), utt("u2", "s1", "m"), utt("u3", "s2", "f"),
                utt("u4", "s2", "f")]
        with pytest.raises(NoNegativesError):
            make_sv_trials(utts)

    def test_no_positives(self):
        utts = [utt("u1", "s1"), utt("u2", "s2")]
        with pytest.raises(NoPositivesError):
            make_sv_trials(utts)

    @given(st.integers(0, 100_000))
    @settings(max_examples=60, deadline=None)
    def test_counts_match_exhaustive_enumeration(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 50))
        tuples = []
        for i in range(n):
            speaker = f"s{rng.integers(0, max(2, n // 3))}"
            gender = "m" if rng.integers(0, 2) else "f"
            tuples.append((f"u{i:03d}", speaker, gender))
        expected_pos, expected_neg = oracles.bf_trial_counts(tuples)
        utts = [utt(u, s, g) for u, s, g in tuples]
        if expected_pos == 0 or expected_neg == 0:
            with pytest.raises((NoPositivesError, NoNegativesError)):
                make_sv_trials(utts)
            return
        trials = make_sv_trials(utts)
        assert sum(t.label == SAME_SPEAKER for t in trials) == expected_pos
        assert sum(t.label == DIFFERENT_SPEAKER for t in trials) == expected_neg
        speaker = dict((u, s) for u, s, _ in tuples)
        gender = dict((u, g) for u, _, g in tuples)
        for t in trials:
            assert t.utt_a < t.utt_b
            if t.label == DIFFERENT_SPEAKER:
                assert speaker[t.utt_a] != speaker[t.utt_b]
                assert gender[t.utt_a] == gender[t.utt_b]
            else:
                assert speaker[t.utt_a] == speaker[t.utt_b]

    def test_cap_subsamples_deterministically(self):
        utts = [utt(f"u{i:02d}", f"s{i // 2}") for i in range(20)]
        a = make_sv_trials(utts, max_per_class=5, rng_seed=42)
        b = make_sv_trials(utts, max_per_class=5, rng_seed=42)
        c = make_sv_trials(utts, max_per_class=5, rng_seed=43)
        assert a == b
        assert a != c
        assert sum(t.label == SAME_SPEAKER for t in a) == 5
        assert sum(t.label == DIFFERENT_SPEAKER for t in a) == 5

    def test_cap_preserves_sorted_order(self):
        utts = [utt(f"u{i:02d}", f"s{i // 2}") for i in range(20)]
        trials = make_sv_trials(utts, max_per_class=7, rng_seed=1)
        positives = [t for t in trials if t.label == SAME_SPEAKER]
        assert positives == sorted(positives, key=lambda t: (t.utt_a, t.utt_b))


class TestEmbedding:
    def test_already_unit(self):
        vec = embed_utterance([np.array([[0.6, 0.8]])])
        assert vec == pytest.approx([0.6, 0.8])

    def test_temporal_pooling(self):
        vec = embed_utterance([np.array([[1.0, 0.0], [0.0, 1.0]])])
        assert vec == pytest.approx([math.sqrt(2) / 2, math.sqrt(2) / 2])

    def test_zero_norm(self):
        with pytest.raises(ZeroNormError):
            embed_utterance([np.zeros((3, 4))])

    def test_layer_averaging(self):
        layers = [np.array([[1.0, 0.0]]), np.array([[0.0, 1.0]])]
        assert embed_utterance(layers, last_k=2) == pytest.approx(
            [math.sqrt(2) / 2, math.sqrt(2) / 2])
        assert embed_utterance(layers, last_k=1) == pytest.approx([0.0, 1.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            embed_utterance([np.ones((2, 3)), np.ones((2, 4))], last_k=2)

    def test_bad_last_k(self):
        with pytest.raises(ValueError, match="last_k"):
            embed_utterance([np.ones((2, 3))], last_k=2)

    @given(st.integers(0, 100_000))
    @settings(max_examples=60, deadline=None)
    def test_unit_norm_property(self, seed):
        rng = np.random.default_rng(seed)
        layers = [rng.normal(size=(4, 8)) for _ in range(3)]
        vec = embed_utterance(layers, last_k=int(rng.integers(1, 4)))
        assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-9)


class TestCentroids:
    def test_identical_sets(self):
        vecs = [np.array([0.6, 0.8]), np.array([1.0, 0.0])]
        dist = centroid_distances({"de": vecs, "pt": list(vecs)})
        assert dist[("de", "pt")] == pytest.approx(0.0)

    def test_three_four_five(self):
        dist = centroid_distances({"a": [np.array([3.0, 4.0])],
                                   "b": [np.array([0.0, 0.0])]})
        assert dist[("a", "b")] == pytest.approx(5.0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            centroid_distances({"a": [np.ones(2)], "b": [np.ones(3)]})

    def test_empty(self):
        with pytest.raises(ValueError, match="empty"):
            centroid_distances({})

    @given(st.integers(0, 100_000))
    @settings(max_examples=40, deadline=None)
    def test_symmetry_and_triangle(self, seed):
        rng = np.random.default_rng(seed)
        langs = {f"l{i}": [rng.normal(size=4) for _ in range(rng.integers(1, 5))]
                 for i in range(4)}
        dist = centroid_distances(langs)
        codes = sorted(langs)
        for a, b, c in itertools.permutations(codes, 3):
            d_ab = dist[tuple(sorted((a, b)))]
            d_bc = dist[tuple(sorted((b, c)))]
            d_ac = dist[tuple(sorted((a, c)))]
            assert d_ac <= d_ab + d_bc + 1e-9


class TestScoring:
    def test_cosine(self):
        assert cosine_score(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0
        assert cosine_score(np.array([2.0, 0.0]), np.array([1.0, 0.0])) == 1.0

    def test_score_trials_and_auc(self):
        embeddings = {
            "u1": np.array([1.0, 0.0]),
            "u2": np.array([0.9, 0.1]),
            "u3": np.array([0.0, 1.0]),
        }
        trials = make_sv_trials([
            utt("u1", "s1"), utt("u2", "s1"), utt("u3", "s2"),
        ])
        scores = score_trials(trials, embeddings)
        assert len(scores) == len(trials)
        assert trials_auc(trials, scores) == 1.0

    def test_missing_embedding(self):
        trials = make_sv_trials([utt("u1", "s1"), utt("u2", "s1"), utt("u3", "s2")])
        with pytest.raises(KeyError):
            score_trials(trials, {"u1": np.array([1.0, 0.0])})


class TestFileIO:
    def test_trials_csv_round_trip(self):
        utts = [utt("u1", "s1"), utt("u2", "s1"), utt("u3", "s2")]
        trials = make_sv_trials(utts)
        assert trials_from_csv(trials_to_csv(trials)) == trials

    def test_embeddings_jsonl(self):
        lines = "\n".join([
            '{"id": "u1", "speaker_id": "s1", "gender": "m", "language": "de", '
            '"vector": [0.6, 0.8]}',
            '{"id": "u2", "speaker_id": "s1", "gender": "m", "language": "de", '
            '"vectors": [[1.0, 0.0], [0.0, 1.0]]}',
            '{"id": "u3", "speaker_id": "s2", "gender": "f", "language": "pt"}',
        ])
        utts = read_embeddings_jsonl(lines)
        assert utts[0].embedding == pytest.approx([0.6, 0.8])
        assert utts[1].embedding == pytest.approx([math.sqrt(2) / 2] * 2)
        assert utts[2].embedding is None
