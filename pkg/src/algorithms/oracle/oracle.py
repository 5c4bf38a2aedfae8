import itertools
import logging
import math
from typing import Tuple

import numpy as np

from common.compute import cme, mm_penalty, to_db
from common.errors import InvalidArgumentError
from common.rotations import preview_pair
from common.typings import Criterion, RealStackedBlock, RotationKind, RowPair, SampleBlock

logger = logging.getLogger(__name__)

DEFAULT_GRID_STEP = 1e-4
DEFAULT_HYPERBOLIC_BOUND = 1.0
CHUNK = 1024   # grid points evaluated per batch


def grid_min_givens(
    data: RealStackedBlock,
    pair: RowPair,
    criterion: Criterion,
    d_or_R: float,
    grid_step: float = DEFAULT_GRID_STEP
) -> Tuple[float, float]:
    """Brute-force minimizer of the true cost over theta in [-pi/4, pi/4].

    Args:
        data (RealStackedBlock): stacked block, left untouched
        pair (RowPair): rows the rotation acts on
        criterion (Criterion): MM (d_or_R is the dispersion) or AM (half spacing)
        d_or_R (float): dispersion R or half spacing d
        grid_step (float): spacing of the theta grid

    Returns:
        Tuple[float, float]: (theta*, cost of the whole block at theta*)
    """
    return _grid_min(data, pair, RotationKind.GIVENS, criterion, d_or_R, grid_step, math.pi / 4)


def grid_min_hyperbolic(
    data: RealStackedBlock,
    pair: RowPair,
    criterion: Criterion,
    d_or_R: float,
    grid_step: float = DEFAULT_GRID_STEP,
    bound: float = DEFAULT_HYPERBOLIC_BOUND
) -> Tuple[float, float]:
    """Same search as grid_min_givens over gamma in [-bound, bound]."""
    if not bound > 0:
        raise InvalidArgumentError(f"bound must be positive, got {bound}")
    return _grid_min(data, pair, RotationKind.HYPERBOLIC, criterion, d_or_R, grid_step, bound)


def naive_mm_cost(data: RealStackedBlock, dispersion: float) -> float:
    total = 0.0
    for row in data.data:
        for x in row:
            total += (float(x) ** 2 - dispersion) ** 2
    return total


def naive_ama_cost(data: RealStackedBlock, d: float) -> float:
    total = 0.0
    for row in data.data:
        for x in row:
            total += 1.0 - math.sin(float(x) * math.pi / (2.0 * d)) ** 2
    return total


def naive_sinr_db(
    g_matrix: np.ndarray,
    assignment: np.ndarray,
    w: np.ndarray,
    sources: SampleBlock,
    noise_cov: np.ndarray
) -> float:
    """Average SINR re-evaluated term by term with plain loops."""
    n_out, n_src = g_matrix.shape
    n_samples = sources.cols
    ratios = []
    for j in range(n_out):
        signal, interference = 0.0, 0.0
        for k in range(n_src):
            power = sum(abs(x) ** 2 for x in sources.data[k]) / n_samples
            term = abs(g_matrix[j, k]) ** 2 * power
            if k == assignment[j]:
                signal += term
            else:
                interference += term
        noise = 0.0
        for r in range(w.shape[1]):
            for s in range(w.shape[1]):
                noise += (w[j, r] * noise_cov[r, s] * np.conj(w[j, s])).real
        denominator = interference + noise
        ratios.append(math.inf if denominator <= 0 else signal / denominator)
    return to_db(sum(ratios) / n_out)


def best_permutation(g_matrix: np.ndarray) -> np.ndarray:
    """Assignment maximizing sum_j |g_{j, assignment[j]}|^2 over every permutation."""
    n = g_matrix.shape[0]
    power = np.abs(g_matrix) ** 2
    best = max(itertools.permutations(range(n)),
               key=lambda perm: sum(power[j, k] for j, k in enumerate(perm)))
    return np.array(best, dtype=int)


def _grid(bound: float, step: float) -> np.ndarray:
    # integer multiples of step plus both ends, so a 10x finer grid holds every coarse point
    n = int(math.floor(bound / step + 1e-9))
    grid = np.arange(-n, n + 1) * step
    return np.unique(np.concatenate([[-bound], grid[np.abs(grid) <= bound], [bound]]))


def _grid_min(
    data: RealStackedBlock,
    pair: RowPair,
    kind: RotationKind,
    criterion: Criterion,
    d_or_R: float,
    grid_step: float,
    bound: float
) -> Tuple[float, float]:
    if not grid_step > 0:
        raise InvalidArgumentError(f"grid_step must be positive, got {grid_step}")

    def penalty(values: np.ndarray) -> np.ndarray:
        return mm_penalty(values, d_or_R) if criterion is Criterion.MM else cme(values, d_or_R)

    touched = sorted({row for couple in pair.rows(data.n_streams) for row in couple})
    untouched = [row for row in range(data.data.shape[0]) if row not in touched]
    base = float(np.sum(penalty(data.data[untouched]))) if untouched else 0.0

    grid = _grid(bound, grid_step)
    costs = np.empty(grid.size)
    for start in range(0, grid.size, CHUNK):
        params = grid[start:start + CHUNK, None]
        if kind is RotationKind.GIVENS:
            c, s = np.cos(params), np.sin(params)
        else:
            c, s = np.cosh(params), np.sinh(params)
        rotated = preview_pair(data, pair, kind, c, s)
        costs[start:start + CHUNK] = penalty(rotated).sum(axis=(1, 2))

    best = int(np.argmin(costs))
    logger.debug("%s grid over %d points: min %.6g at %.5f",
                 kind.value, grid.size, costs[best], grid[best])
    return float(grid[best]), base + float(costs[best])
