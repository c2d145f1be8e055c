"""Deterministic stream primitives."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cltm.rng import SplitMix64, derive_key, fnv1a64, mix64, sample_indices


class TestSplitMix64:
    def test_reference_sequence(self):
        # published SplitMix64 outputs for seed 0
        stream = SplitMix64(0)
        assert [stream.next_u64() for _ in range(3)] == [
            0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F,
        ]

    def test_unit_range(self):
        stream = SplitMix64(123)
        for _ in range(1000):
            assert 0.0 <= stream.next_unit() < 1.0
        stream = SplitMix64(123)
        for _ in range(1000):
            assert 0.0 < stream.next_unit_open() <= 1.0

    def test_gauss_moments(self):
        stream = SplitMix64(7)
        draws = [stream.next_gauss() for _ in range(20_000)]
        mean = sum(draws) / len(draws)
        var = sum((d - mean) ** 2 for d in draws) / (len(draws) - 1)
        assert abs(mean) < 0.03
        assert abs(var - 1.0) < 0.05

    @given(st.integers(1, 1000))
    @settings(max_examples=40)
    def test_next_below_bounds(self, bound):
        stream = SplitMix64(bound)
        for _ in range(50):
            assert 0 <= stream.next_below(bound) < bound


class TestDeriveKey:
    def test_deterministic(self):
        assert derive_key(7, "de", "Base", None, 3) == derive_key(7, "de", "Base", None, 3)

    def test_sensitive_to_every_part(self):
        base = derive_key(7, "de", "Base", None, 3)
        assert derive_key(8, "de", "Base", None, 3) != base
        assert derive_key(7, "pt", "Base", None, 3) != base
        assert derive_key(7, "de", "SelfAugmented", None, 3) != base
        assert derive_key(7, "de", "Base", "pt", 3) != base
        assert derive_key(7, "de", "Base", None, 4) != base

    def test_separator_prevents_concat_collisions(self):
        assert derive_key("ab", "c") != derive_key("a", "bc")

    def test_negative_ints_fold(self):
        assert derive_key(-1) == derive_key(-1)
        assert derive_key(-1) != derive_key(1)

    def test_rejects_unsupported(self):
        with pytest.raises(TypeError):
            derive_key(1.5)


class TestSampling:
    def test_sorted_subset(self):
        stream = SplitMix64(derive_key(5, "pos"))
        chosen = sample_indices(100, 10, stream)
        assert chosen == sorted(chosen)
        assert len(set(chosen)) == 10
        assert all(0 <= i < 100 for i in chosen)

    def test_cap_at_population(self):
        stream = SplitMix64(0)
        assert sample_indices(5, 9, stream) == [0, 1, 2, 3, 4]

    def test_roughly_uniform(self):
        hits = [0] * 20
        for seed in range(2000):
            stream = SplitMix64(derive_key(seed, "u"))
            for i in sample_indices(20, 5, stream):
                hits[i] += 1
        expected = 2000 * 5 / 20
        sd = math.sqrt(2000 * (5 / 20) * (15 / 20))
        for count in hits:
            assert abs(count - expected) < 5 * sd


class TestHashes:
    def test_fnv_reference(self):
        # FNV-1a 64 of empty input is the offset basis
        assert fnv1a64(b"") == 0xCBF29CE484222325
        assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C

    def test_mix64_avalanche(self):
        assert mix64(0) != mix64(1)
