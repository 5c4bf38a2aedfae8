from math import inf, log10, pi

import numpy as np

from .errors import InvalidArgumentError
from .typings import Algorithm

SINR_CAP_DB = 300.0

# leading-order flops per sweep, in units of N_s * N_t^2
SWEEP_FLOP_FACTORS = {
    Algorithm.G_MMA: 20,
    Algorithm.HG_MMA: 40,
    Algorithm.G_AMA: 70,
    Algorithm.HG_AMA: 140,
}


def to_db(ratio: int | float) -> float:
    """Power ratio to decibels, capped at SINR_CAP_DB.

    Args:
        ratio (int | float): linear power ratio

    Returns:
        float: ratio in dB, SINR_CAP_DB when the ratio is infinite,
        -inf when it is not positive
    """
    if ratio == inf:
        return SINR_CAP_DB
    if ratio <= 0:
        return -inf
    return min(10.0 * log10(ratio), SINR_CAP_DB)


def from_db(value_db: int | float) -> float:
    return 10.0 ** (value_db / 10.0)


def cme(x: float | np.ndarray, d: float) -> float | np.ndarray:
    """Constellation matched error 1 - sin^2(x pi / 2d).

    Zero on odd multiples of d (alphabet coordinates), one on even multiples.

    Args:
        x (float | np.ndarray): real coordinate(s)
        d (float): half spacing of the alphabet

    Returns:
        float | np.ndarray: penalty in [0, 1], same shape as x
    """
    if d <= 0:
        raise InvalidArgumentError(f"half spacing must be positive, got {d}")
    return 1.0 - np.sin(np.asarray(x) * (pi / (2.0 * d))) ** 2


def mm_penalty(x: float | np.ndarray, dispersion: float) -> float | np.ndarray:
    """Multimodulus penalty (x^2 - R)^2 per real coordinate."""
    x = np.asarray(x)
    return (x * x - dispersion) ** 2


def sweep_flop_estimate(algorithm: Algorithm, n_streams: int, n_samples: int) -> int:
    """Leading-order flop count of one sweep.

    Args:
        algorithm (Algorithm): separation algorithm
        n_streams (int): number of sources N_t
        n_samples (int): block length N_s

    Returns:
        int: flops per sweep, ignoring O(N_s N_t) terms
    """
    return SWEEP_FLOP_FACTORS[algorithm] * n_samples * n_streams ** 2
