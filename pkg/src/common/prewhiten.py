import logging

import numpy as np

from .errors import DegenerateDataError, DimensionMismatchError
from .typings import SampleBlock, Whitener, WhiteningMode

logger = logging.getLogger(__name__)

MAX_EIGENVALUE_RATIO = 1e12


def fit_whitener(
    received: SampleBlock,
    n_sources: int,
    mode: WhiteningMode = WhiteningMode.COVARIANCE_WHITENING
) -> Whitener:
    """Build B from the n_sources dominant eigenpairs of the sample covariance.

    Args:
        received (SampleBlock): Y, N_r x N_s
        n_sources (int): N_t, dimension of the signal subspace
        mode (WhiteningMode): covariance whitening (Lambda^-1/2 U^H) or plain
            subspace projection (U^H)

    Returns:
        Whitener: N_t x N_r matrix B

    Raises:
        DegenerateDataError: too few rows/samples, or the retained eigenvalues
            spread beyond MAX_EIGENVALUE_RATIO
    """
    if received.rows < n_sources or received.cols < n_sources:
        raise DegenerateDataError(
            f"cannot whiten {received.rows}x{received.cols} data onto {n_sources} sources")

    y = received.data
    covariance = y @ y.conj().T / received.cols
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    order = np.argsort(eigenvalues)[::-1][:n_sources]
    eigenvalues, eigenvectors = eigenvalues[order], eigenvectors[:, order]

    smallest, largest = eigenvalues[-1], eigenvalues[0]
    if smallest <= 0 or largest / smallest > MAX_EIGENVALUE_RATIO:
        raise DegenerateDataError(
            f"signal subspace is rank deficient (eigenvalues {largest:.3e} .. {smallest:.3e})")

    matrix_b = eigenvectors.conj().T
    if mode is WhiteningMode.COVARIANCE_WHITENING:
        matrix_b = matrix_b / np.sqrt(eigenvalues)[:, None]
    logger.debug("whitener fitted: mode=%s, eigenvalue spread %.3e",
                 mode.value, largest / smallest)
    return Whitener(matrix_b=matrix_b, mode=mode)


def apply_whitener(w: Whitener, received: SampleBlock) -> SampleBlock:
    if received.rows != w.n_rx:
        raise DimensionMismatchError(
            f"whitener expects {w.n_rx} rows, received block has {received.rows}")
    return SampleBlock(w.matrix_b @ received.data)
