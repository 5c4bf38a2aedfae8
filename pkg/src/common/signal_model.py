import logging
import math
from dataclasses import replace

import numpy as np

from .compute import from_db
from .errors import ChannelGenerationError, DimensionMismatchError, InvalidArgumentError
from .typings import ChannelInstance, ConstellationSpec, SampleBlock

logger = logging.getLogger(__name__)

SUPPORTED_ORDERS = (4, 16, 64, 256)
CHANNEL_RETRY_CAP = 1000


def build_constellation(order: int) -> ConstellationSpec:
    """Describe the unit-average-power square QAM alphabet of the given order.

    Points are c(a + ib) with a, b odd integers in [-(sqrt(L)-1), sqrt(L)-1],
    so the lattice spacing is 2c and the half spacing d equals c.

    Args:
        order (int): number of points L, one of 4, 16, 64, 256

    Returns:
        ConstellationSpec: normalized alphabet descriptor

    Raises:
        InvalidArgumentError: if the order is not supported
    """
    if order not in SUPPORTED_ORDERS:
        raise InvalidArgumentError(
            f"unsupported QAM order {order}, expected one of {SUPPORTED_ORDERS}")

    side = math.isqrt(order)
    levels = np.arange(-(side - 1), side, 2, dtype=float)
    second_moment = float(np.mean(levels ** 2))   # E[a^2] per axis
    fourth_moment = float(np.mean(levels ** 4))
    scale = 1.0 / math.sqrt(2.0 * second_moment)
    raw_dispersion = fourth_moment / second_moment

    return ConstellationSpec(
        order=order,
        half_spacing=scale,
        scale=scale,
        dispersion=raw_dispersion * scale ** 2,
        raw_dispersion=raw_dispersion,
    )


def draw_sources(
    spec: ConstellationSpec,
    n_sources: int,
    n_samples: int,
    rng_seed: int
) -> SampleBlock:
    """I.i.d. uniform alphabet symbols, n_sources x n_samples."""
    if n_sources < 1 or n_samples < 1:
        raise InvalidArgumentError(
            f"need n_sources >= 1 and n_samples >= 1, got {n_sources}, {n_samples}")
    rng = np.random.default_rng(rng_seed)
    levels = spec.levels
    idx = rng.integers(0, spec.side, size=(2, n_sources, n_samples))
    return SampleBlock(spec.scale * (levels[idx[0]] + 1j * levels[idx[1]]))


def draw_channel(
    n_rx: int,
    n_tx: int,
    condition_bound: float,
    rng_seed: int,
    max_retries: int = CHANNEL_RETRY_CAP
) -> ChannelInstance:
    """Draw an i.i.d. unit-variance complex Gaussian mixing matrix.

    Draws are rejected until the 2-norm condition number is at most
    condition_bound; an infinite bound accepts the first draw.

    Args:
        n_rx (int): receive antennas N_r
        n_tx (int): sources N_t, at most n_rx
        condition_bound (float): kappa_max, must exceed 1
        rng_seed (int): seed of the draw
        max_retries (int): number of draws before giving up

    Returns:
        ChannelInstance: accepted mixing matrix, noise variance left at 0

    Raises:
        InvalidArgumentError: on inconsistent dimensions or bound
        ChannelGenerationError: if no draw meets the bound within max_retries
    """
    if not 1 <= n_tx <= n_rx:
        raise InvalidArgumentError(f"need 1 <= n_tx <= n_rx, got {n_tx}, {n_rx}")
    if not condition_bound > 1:
        raise InvalidArgumentError(f"condition bound must exceed 1, got {condition_bound}")

    rng = np.random.default_rng(rng_seed)
    for attempt in range(max_retries):
        mixing = (rng.standard_normal((n_rx, n_tx))
                  + 1j * rng.standard_normal((n_rx, n_tx))) / math.sqrt(2.0)
        if math.isinf(condition_bound) or np.linalg.cond(mixing) <= condition_bound:
            logger.debug("channel accepted after %d draw(s)", attempt + 1)
            return ChannelInstance(mixing=mixing, condition_bound=condition_bound)

    raise ChannelGenerationError(
        f"no {n_rx}x{n_tx} channel with condition number <= {condition_bound} "
        f"in {max_retries} draws")


def calibrate_noise(
    channel: ChannelInstance,
    sources: SampleBlock,
    snr_db: float
) -> ChannelInstance:
    """Set the noise variance so that E||A s||^2 / (N_r sigma^2) hits snr_db.

    The signal power is measured on the given source block; snr_db = +inf
    disables the noise.
    """
    _check_conforming(channel, sources)
    if math.isinf(snr_db) and snr_db > 0:
        return replace(channel, noise_variance=0.0)
    signal = channel.mixing @ sources.data
    signal_power = float(np.mean(np.abs(signal) ** 2))
    return replace(channel, noise_variance=signal_power / from_db(snr_db))


def transmit(
    channel: ChannelInstance,
    sources: SampleBlock,
    snr_db: float,
    rng_seed: int
) -> SampleBlock:
    """Y = A S + N with circular white Gaussian N at the requested SNR."""
    channel = calibrate_noise(channel, sources, snr_db)
    received = channel.mixing @ sources.data
    if channel.noise_variance > 0:
        rng = np.random.default_rng(rng_seed)
        shape = received.shape
        noise = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
        received = received + math.sqrt(channel.noise_variance / 2.0) * noise
    return SampleBlock(received)


def _check_conforming(channel: ChannelInstance, sources: SampleBlock) -> None:
    if sources.rows != channel.n_tx:
        raise DimensionMismatchError(
            f"channel expects {channel.n_tx} sources, block has {sources.rows} rows")
