"""Shared fixtures for the suite."""

import sys
from pathlib import Path

import pytest

from cltm import aggregate_grid, generate_experiment, preset

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable


@pytest.fixture(scope="session")
def block_truth_noiseless():
    truth = preset("block")
    truth.noise_sd = 0.0
    return truth


@pytest.fixture(scope="session")
def block_grid_noiseless(block_truth_noiseless):
    records = generate_experiment(block_truth_noiseless, master_seed=7)
    return aggregate_grid(records, block_truth_noiseless.languages,
                          block_truth_noiseless.n_samples)
