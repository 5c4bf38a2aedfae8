import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial

from common.compute import mm_penalty
from common.errors import InvalidArgumentError
from common.typings import (
    HyperbolicSystem,
    PairFamily,
    QuadraticFormAccumulator,
    RealStackedBlock,
    RowPair,
)

logger = logging.getLogger(__name__)

GAMMA_BOUND = 1.0        # |gamma| clamp, cosh(gamma) <= ~1.54
ARCTANH_CLAMP = 0.99
IMAG_TOL = 1e-8
CONSTRAINT_TOL = 1e-6
MAX_CONDITION = 1e12
J2 = np.diag([1.0, -1.0])


def mm_cost(
    data: RealStackedBlock,
    dispersion: float,
    rows: Optional[Sequence[int]] = None
) -> float:
    """Multimodulus cost sum (y^2 - R)^2 over the listed rows (all rows by default)."""
    values = data.data if rows is None else data.data[list(rows)]
    return float(np.sum(mm_penalty(values, dispersion)))


def accumulate_givens_form(data: RealStackedBlock, pair: RowPair) -> QuadraticFormAccumulator:
    """T = sum_i t_i t_i^T over every row couple of the pair.

    t_i = [(y_a^2 - y_b^2) / 2, y_a y_b]; the diagonal family contributes its
    single couple, the paired families both.
    """
    t_matrix = np.zeros((2, 2))
    for a, b in pair.rows(data.n_streams):
        y_a, y_b = data.data[a], data.data[b]
        t = np.vstack([0.5 * (y_a ** 2 - y_b ** 2), y_a * y_b])
        t_matrix += t @ t.T
    return QuadraticFormAccumulator(t_matrix)


def solve_givens_theta(form: QuadraticFormAccumulator) -> Tuple[float, float]:
    """(cos theta, sin theta) minimizing v^T T v with v = [cos 2theta, sin 2theta].

    Returns the identity when the two eigenvalues tie.
    """
    eigenvalues, eigenvectors = np.linalg.eigh(form.t_matrix)
    if math.isclose(eigenvalues[0], eigenvalues[1], rel_tol=1e-12, abs_tol=1e-300):
        return 1.0, 0.0

    v1, v2 = eigenvectors[:, 0] / np.linalg.norm(eigenvectors[:, 0])
    if v1 < 0 or (v1 == 0 and v2 < 0):
        v1, v2 = -v1, -v2
    return math.sqrt((1.0 + v1) / 2.0), v2 / math.sqrt(2.0 * (1.0 + v1))


def accumulate_hyperbolic_system(
    data: RealStackedBlock,
    pair: RowPair,
    dispersion: float = 1.0
) -> HyperbolicSystem:
    """R = sum_i r_i r_i^T and r = dispersion * sum_i r_i for a paired family.

    r_i = [(y_a^2 + y_b^2) / 2, y_a y_b]; the second couple of the cross family
    turns with -gamma, which flips the sign of its cross term.
    """
    if pair.family is PairFamily.DIAGONAL:
        raise InvalidArgumentError("hyperbolic rotations need two distinct sources")
    r_matrix = np.zeros((2, 2))
    r_sum = np.zeros(2)
    for index, (a, b) in enumerate(pair.rows(data.n_streams)):
        sign = -1.0 if (pair.family is PairFamily.CROSS and index == 1) else 1.0
        y_a, y_b = data.data[a], data.data[b]
        r = np.vstack([0.5 * (y_a ** 2 + y_b ** 2), sign * y_a * y_b])
        r_matrix += r @ r.T
        r_sum += r.sum(axis=1)
    return HyperbolicSystem(r_matrix=r_matrix, r_vector=dispersion * r_sum)


def hyperbolic_cost(sys: HyperbolicSystem, gamma: float) -> float:
    """u^T R u - 2 u^T r at u = [cosh 2gamma, sinh 2gamma]."""
    u = np.array([math.cosh(2.0 * gamma), math.sinh(2.0 * gamma)])
    return float(u @ sys.r_matrix @ u - 2.0 * u @ sys.r_vector)


def solve_hyperbolic_lagrangian(sys: HyperbolicSystem) -> Tuple[Optional[np.ndarray], float]:
    """Minimize u^T R u - 2 u^T r subject to u^T J u = 1, u_1 > 0.

    Stationary points satisfy (R + lambda J) u = r; clearing the denominator of
    the constraint gives a quartic in lambda. Among its admissible real roots
    the one with the smallest cost wins (ties go to the smallest |lambda|).
    Without an admissible root lambda = 0 is used and u is pulled back onto
    the hyperbola.

    Args:
        sys (HyperbolicSystem): accumulated R and r

    Returns:
        Tuple[Optional[np.ndarray], float]: (u, lambda) with u_1 >= 1 and
        u_1^2 - u_2^2 = 1, or (None, 0.0) when no usable u exists
    """
    r11, r12, r22 = (float(sys.r_matrix[0, 0]), float(sys.r_matrix[0, 1]),
                     float(sys.r_matrix[1, 1]))
    r1, r2 = (float(v) for v in sys.r_vector)
    lam = Polynomial([0.0, 1.0])
    n1 = (r22 - lam) * r1 - r12 * r2
    n2 = -r12 * r1 + (r11 + lam) * r2
    det = (r11 + lam) * (r22 - lam) - r12 ** 2
    quartic = n1 ** 2 - n2 ** 2 - det ** 2
    slope = quartic.deriv()

    best: Optional[Tuple[float, float, np.ndarray]] = None
    for root in quartic.roots():
        if abs(root.imag) > IMAG_TOL * max(1.0, abs(root)):
            continue
        value = float(root.real)
        for _ in range(2):
            step = slope(value)
            if step == 0:
                break
            value -= quartic(value) / step
        u = _solve_stationary(sys, value)
        if u is None or u[0] <= 0:
            continue
        if abs(u[0] ** 2 - u[1] ** 2 - 1.0) > CONSTRAINT_TOL * max(1.0, u[0] ** 2):
            continue
        cost = float(u @ sys.r_matrix @ u - 2.0 * u @ sys.r_vector)
        if best is None or _better(cost, value, best[0], best[1]):
            best = (cost, value, u)

    if best is not None:
        _, value, u = best
        return u / math.sqrt(u[0] ** 2 - u[1] ** 2), value

    logger.debug("no admissible quartic root, falling back to lambda = 0")
    u = _solve_stationary(sys, 0.0)
    if u is None or u[0] <= abs(u[1]):
        return None, 0.0
    return u / math.sqrt(u[0] ** 2 - u[1] ** 2), 0.0


def solve_hyperbolic_exact(sys: HyperbolicSystem) -> Tuple[float, float]:
    """(cosh gamma, sinh gamma) from the Lagrangian solution, |gamma| clamped to GAMMA_BOUND."""
    u, _ = solve_hyperbolic_lagrangian(sys)
    if u is None:
        return 1.0, 0.0
    sinh_gamma = u[1] / math.sqrt(2.0 * (1.0 + u[0]))
    return _finish_gamma(sys, math.asinh(sinh_gamma))


def solve_hyperbolic_approx(sys: HyperbolicSystem) -> Tuple[float, float]:
    """gamma = atanh((r_2 - R_12) / (R_11 + R_22 - r_1)) / 2, argument clamped to +-0.99."""
    (r11, r12), (_, r22) = sys.r_matrix
    r1, r2 = sys.r_vector
    denominator = r11 + r22 - r1
    if denominator == 0:
        return 1.0, 0.0
    argument = float(np.clip((r2 - r12) / denominator, -ARCTANH_CLAMP, ARCTANH_CLAMP))
    return _finish_gamma(sys, 0.5 * math.atanh(argument))


def compute_normalization(
    data: RealStackedBlock,
    streams: Optional[Sequence[int]] = None
) -> np.ndarray:
    """lambda_p = sqrt(sum(y^2) / sum(y^4)) over rows p and p+N.

    Only the listed streams (all by default) are scaled; the others, and
    streams without energy, get 1.
    """
    n = data.n_streams
    squares = data.data ** 2
    numerator = squares[:n].sum(axis=1) + squares[n:].sum(axis=1)
    denominator = (squares[:n] ** 2).sum(axis=1) + (squares[n:] ** 2).sum(axis=1)
    lambdas = np.ones(n)
    usable = denominator > 0
    if streams is not None:
        selected = np.zeros(n, dtype=bool)
        selected[list(streams)] = True
        usable &= selected
    lambdas[usable] = np.sqrt(numerator[usable] / denominator[usable])
    return lambdas


def _solve_stationary(sys: HyperbolicSystem, lam: float) -> Optional[np.ndarray]:
    matrix = sys.r_matrix + lam * J2
    if not np.all(np.isfinite(matrix)):
        return None
    with np.errstate(divide="ignore", invalid="ignore"):
        condition = np.linalg.cond(matrix)
    if not condition <= MAX_CONDITION:
        return None
    return np.linalg.solve(matrix, sys.r_vector)


def _better(cost: float, lam: float, best_cost: float, best_lam: float) -> bool:
    if math.isclose(cost, best_cost, rel_tol=1e-12, abs_tol=1e-12):
        return abs(lam) < abs(best_lam)
    return cost < best_cost


def _finish_gamma(sys: HyperbolicSystem, gamma: float) -> Tuple[float, float]:
    if abs(gamma) > GAMMA_BOUND:
        logger.debug("hyperbolic parameter %.3f clamped to +-%.1f", gamma, GAMMA_BOUND)
        gamma = math.copysign(GAMMA_BOUND, gamma)
    if hyperbolic_cost(sys, gamma) > hyperbolic_cost(sys, 0.0):
        gamma = 0.0
    return math.cosh(gamma), math.sinh(gamma)
