"""Shared fixtures for the separation test suite."""

import numpy as np
import pytest

from algorithms.oracle import warm_started_block, whitened_block
from common.signal_model import build_constellation
from common.typings import ConstellationSpec, RealStackedBlock

N_STREAMS = 3
N_SAMPLES = 100


@pytest.fixture
def spec16() -> ConstellationSpec:
    """16-QAM alphabet."""
    return build_constellation(16)


@pytest.fixture
def spec64() -> ConstellationSpec:
    """64-QAM alphabet."""
    return build_constellation(64)


@pytest.fixture
def block(spec16: ConstellationSpec) -> RealStackedBlock:
    """Whitened 3-source, 100-sample block at 30 dB."""
    return whitened_block(spec16, N_STREAMS, N_SAMPLES, seed=7)


@pytest.fixture
def warm_block(spec16: ConstellationSpec) -> RealStackedBlock:
    """Same kind of block after a G-MMA warm start."""
    return warm_started_block(spec16, N_STREAMS, N_SAMPLES, seed=11)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for per-test random data."""
    return np.random.default_rng(2024)
