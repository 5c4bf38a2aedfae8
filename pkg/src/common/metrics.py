import logging

import numpy as np

from .compute import SINR_CAP_DB, to_db
from .errors import DegenerateSeparationError, DimensionMismatchError
from .typings import ConstellationSpec, GlobalSystem, SampleBlock

logger = logging.getLogger(__name__)


def resolve_ambiguity(w: np.ndarray, a: np.ndarray) -> GlobalSystem:
    """Match separator outputs to sources greedily by descending |g_jk| of G = W A.

    Raises:
        DegenerateSeparationError: if a matched entry of G is zero
    """
    if w.shape[1] != a.shape[0]:
        raise DimensionMismatchError(f"W {w.shape} and A {a.shape} do not conform")
    g_matrix = w @ a
    n_out, n_src = g_matrix.shape
    magnitude = np.abs(g_matrix).astype(float)
    assignment = np.full(n_out, -1, dtype=int)

    for _ in range(min(n_out, n_src)):
        j, k = np.unravel_index(np.argmax(magnitude), magnitude.shape)
        if magnitude[j, k] <= 0:
            raise DegenerateSeparationError(
                f"output {j} carries no energy from any unassigned source")
        assignment[j] = k
        magnitude[j, :] = -1.0
        magnitude[:, k] = -1.0

    gains = g_matrix[np.arange(n_out), assignment]
    return GlobalSystem(g_matrix=g_matrix, assignment=assignment, gains=gains)


def output_sinr(
    sys: GlobalSystem,
    w: np.ndarray,
    sources: SampleBlock,
    noise_cov: np.ndarray
) -> np.ndarray:
    """Linear SINR of every output (inf where interference and noise vanish)."""
    powers = np.sum(np.abs(sources.data) ** 2, axis=1) / sources.cols
    contributions = np.abs(sys.g_matrix) ** 2 * powers[None, :]
    rows = np.arange(sys.g_matrix.shape[0])
    signal = contributions[rows, sys.assignment]
    interference = contributions.sum(axis=1) - signal
    noise = np.real(np.einsum("jr,rs,js->j", w, noise_cov, w.conj()))
    denominator = interference + noise
    with np.errstate(divide="ignore"):
        return np.where(denominator > 0, signal / np.where(denominator > 0, denominator, 1.0),
                        np.inf)


def compute_sinr(
    sys: GlobalSystem,
    w: np.ndarray,
    sources: SampleBlock,
    noise_cov: np.ndarray
) -> float:
    """Average SINR over outputs, in dB, capped at SINR_CAP_DB.

    Args:
        sys (GlobalSystem): resolved global system G = W A
        w (np.ndarray): separator W, N_t x N_r
        sources (SampleBlock): transmitted symbols S
        noise_cov (np.ndarray): noise covariance R_n, N_r x N_r

    Returns:
        float: 10 log10 of the mean linear SINR
    """
    if noise_cov.shape != (w.shape[1], w.shape[1]):
        raise DimensionMismatchError(
            f"noise covariance {noise_cov.shape} does not match W {w.shape}")
    return to_db(float(np.mean(output_sinr(sys, w, sources, noise_cov))))


def residual_interference_db(sys: GlobalSystem) -> float:
    """Mean interference-to-signal power ratio of the rows of G, in dB."""
    power = np.abs(sys.g_matrix) ** 2
    rows = np.arange(power.shape[0])
    signal = power[rows, sys.assignment]
    ratio = float(np.mean((power.sum(axis=1) - signal) / signal))
    return to_db(ratio) if ratio > 0 else -SINR_CAP_DB


def hard_decisions(values: np.ndarray, spec: ConstellationSpec) -> np.ndarray:
    """Nearest alphabet point per entry (independent per axis on the square lattice)."""
    def nearest_level(x: np.ndarray) -> np.ndarray:
        index = np.clip(np.rint((x / spec.scale + spec.side - 1) / 2), 0, spec.side - 1)
        return spec.levels[index.astype(int)]

    return spec.scale * (nearest_level(values.real) + 1j * nearest_level(values.imag))


def demap_and_ser(
    separated: SampleBlock,
    sources: SampleBlock,
    sys: GlobalSystem,
    spec: ConstellationSpec
) -> float:
    """Symbol error rate after gain compensation and nearest-neighbour demapping."""
    if separated.rows != sys.assignment.size or separated.cols != sources.cols:
        raise DimensionMismatchError(
            f"separated {separated.data.shape} does not match sources {sources.data.shape}")
    decided = hard_decisions(separated.data / sys.gains[:, None], spec)
    reference = hard_decisions(sources.data[sys.assignment], spec)
    return float(np.mean(decided != reference))
