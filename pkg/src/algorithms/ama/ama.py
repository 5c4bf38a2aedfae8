import logging
import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import minimize_scalar

from common.compute import cme
from common.errors import InvalidArgumentError
from common.rotations import preview_pair
from common.typings import (
    AmaFamily,
    AmaPolynomial,
    PairFamily,
    RealStackedBlock,
    RotationKind,
    RowPair,
    ScalarCost,
    SolverMode,
)
from algorithms.mma import GAMMA_BOUND

logger = logging.getLogger(__name__)

THETA_BOUND = math.pi / 4
GAMMA_SEED = 1e-3
SCALAR_TOL = 1e-6
IMAG_TOL = 1e-8

# signs applied to C1 and C2 when the quartic is evaluated
_FAMILY_SIGNS = {
    AmaFamily.GIVENS: (1.0, 1.0),
    AmaFamily.HYPERBOLIC_PAIR1: (-1.0, -1.0),
    AmaFamily.HYPERBOLIC_PAIR2: (1.0, -1.0),
}


def ama_cost(
    data: RealStackedBlock,
    d: float,
    rows: Optional[Sequence[int]] = None
) -> float:
    """Alphabet matched cost: CME summed over samples and the listed rows (all by default)."""
    values = data.data if rows is None else data.data[list(rows)]
    return float(np.sum(cme(values, d)))


def _givens_terms(y_a: np.ndarray, y_b: np.ndarray, d: float) -> np.ndarray:
    """Per-sample c_0..c_4 of g(cos(t) y_a + sin(t) y_b), shape (5, N_s)."""
    pi = math.pi
    angle = pi * y_a / d
    cos_a, sin_a = np.cos(angle), np.sin(angle)
    c4 = (4 * pi ** 2 * d ** 2 * y_b ** 2 * cos_a + pi ** 4 * y_b ** 4 * cos_a
          - 3 * pi ** 2 * d ** 2 * y_a ** 2 * cos_a - pi * d ** 3 * y_a * sin_a
          - 6 * pi ** 3 * d * y_a * y_b ** 2 * sin_a)
    c3 = (pi * d ** 2 * y_b * sin_a + pi ** 3 * y_b ** 3 * sin_a
          + 3 * pi ** 2 * d * y_a * y_b * cos_a)
    c2 = pi * d * y_a * sin_a - pi ** 2 * y_b ** 2 * cos_a
    c1 = pi * y_b * sin_a
    c0 = 1 + cos_a
    return np.vstack([c0, c1, c2, c3, c4])


def _hyperbolic_terms(y_a: np.ndarray, y_b: np.ndarray, d: float) -> np.ndarray:
    """Per-sample c_0..c_4 of g(cosh(t) y_a + sinh(t) y_b), shape (5, N_s)."""
    pi = math.pi
    angle = pi * y_a / d
    cos_a, sin_a = np.cos(angle), np.sin(angle)
    c4 = (pi ** 4 * y_b ** 4 * cos_a + 6 * pi ** 3 * d * y_a * y_b ** 2 * sin_a
          - 4 * pi ** 2 * d ** 2 * y_b ** 2 * cos_a - 3 * pi ** 2 * d ** 2 * y_a ** 2 * cos_a
          - pi * d ** 3 * y_a * sin_a)
    c3 = (pi ** 3 * y_b ** 3 * sin_a - pi * d ** 2 * y_b * sin_a
          - 3 * pi ** 2 * d * y_a * y_b * cos_a)
    c2 = pi ** 2 * y_b ** 2 * cos_a + pi * d * y_a * sin_a
    c1 = pi * y_b * sin_a
    c0 = 1 + cos_a
    return np.vstack([c0, c1, c2, c3, c4])


def build_ama_polynomial_givens(data: RealStackedBlock, pair: RowPair, d: float) -> AmaPolynomial:
    """Fourth-order Taylor model of the AM cost in theta around 0."""
    _check_spacing(d)
    p_ab, p_ba, p_ab2, p_ba2 = _row_sums(data, pair, d, _givens_terms)
    even = p_ab + p_ba + p_ab2 + p_ba2
    odd = p_ab - p_ba + p_ab2 - p_ba2
    coefficients = (even[0], -odd[1], even[2], odd[3], even[4])
    return AmaPolynomial(tuple(float(c) for c in coefficients), d, AmaFamily.GIVENS)


def build_ama_polynomial_hyperbolic(data: RealStackedBlock, pair: RowPair, d: float) -> AmaPolynomial:
    """Fourth-order Taylor model of the AM cost in gamma around 0.

    The direct family sums every term with a plus sign. In the cross family the
    second couple turns with -gamma, so its odd-order terms enter negated.
    """
    _check_spacing(d)
    p_ab, p_ba, p_ab2, p_ba2 = _row_sums(data, pair, d, _hyperbolic_terms)
    even = p_ab + p_ba + p_ab2 + p_ba2
    if pair.family is PairFamily.DIRECT:
        coefficients, family = tuple(even), AmaFamily.HYPERBOLIC_PAIR1
    else:
        odd = p_ab + p_ba - p_ab2 - p_ba2
        coefficients = (even[0], -odd[1], even[2], odd[3], even[4])
        family = AmaFamily.HYPERBOLIC_PAIR2
    return AmaPolynomial(tuple(float(c) for c in coefficients), d, family)


def as_polynomial(poly: AmaPolynomial) -> Polynomial:
    """The quartic C4/(48d^4) x^4 + C3/(12d^3) x^3 +- C2/(4d^2) x^2 +- C1/(2d) x + C0/2."""
    c0, c1, c2, c3, c4 = poly.coefficients
    d = poly.half_spacing
    sign1, sign2 = _FAMILY_SIGNS[poly.family]
    return Polynomial([c0 / 2, sign1 * c1 / (2 * d), sign2 * c2 / (4 * d ** 2),
                       c3 / (12 * d ** 3), c4 / (48 * d ** 4)])


def solve_ama_givens(
    data: RealStackedBlock,
    pair: RowPair,
    d: float,
    mode: SolverMode = SolverMode.APPROXIMATE
) -> Tuple[float, float]:
    """(cos theta, sin theta) lowering the AM cost of the pair, theta in [-pi/4, pi/4]."""
    def cost(theta: float) -> float:
        return _rotated_cost(data, pair, RotationKind.GIVENS, math.cos(theta), math.sin(theta), d)

    if mode is SolverMode.EXACT:
        result = minimize_scalar(cost, bounds=(-THETA_BOUND, THETA_BOUND), method="bounded",
                                 options={"xatol": SCALAR_TOL})
        candidates = [float(result.x)]
    else:
        gradient = as_polynomial(build_ama_polynomial_givens(data, pair, d)).deriv()
        candidates = [float(np.clip(x, -THETA_BOUND, THETA_BOUND)) for x in _real_roots(gradient)]

    theta = _least_costly(cost, candidates)
    return math.cos(theta), math.sin(theta)


def solve_ama_hyperbolic(
    data: RealStackedBlock,
    pair: RowPair,
    d: float,
    mode: SolverMode = SolverMode.APPROXIMATE
) -> Tuple[float, float]:
    """(cosh gamma, sinh gamma) lowering the AM cost of the pair, |gamma| <= GAMMA_BOUND."""
    ceiling = float(2 * len(pair.rows(data.n_streams)) * data.n_samples)

    def cost(gamma: float) -> float:
        with np.errstate(over="ignore", invalid="ignore"):
            value = _rotated_cost(data, pair, RotationKind.HYPERBOLIC,
                                  np.cosh(gamma), np.sinh(gamma), d)
        return value if math.isfinite(value) else ceiling

    if mode is SolverMode.EXACT:
        candidates = []
        try:
            result = minimize_scalar(cost, bracket=(0.0, GAMMA_SEED), method="brent",
                                     tol=SCALAR_TOL)
            if math.isfinite(result.x):
                candidates.append(float(result.x))
        except RuntimeError:
            logger.debug("hyperbolic AM search failed to bracket a minimum")
    else:
        gradient = as_polynomial(build_ama_polynomial_hyperbolic(data, pair, d)).deriv()
        candidates = list(_real_roots(gradient))

    candidates = [float(np.clip(x, -GAMMA_BOUND, GAMMA_BOUND)) for x in candidates]
    gamma = _least_costly(cost, candidates)
    return math.cosh(gamma), math.sinh(gamma)


def _row_sums(data: RealStackedBlock, pair: RowPair, d: float, terms) -> List[np.ndarray]:
    """Coefficient sums over samples for (a;b), (b;a), (a';b'), (b';a')."""
    if pair.family is PairFamily.DIAGONAL:
        raise InvalidArgumentError("AMA rotations need two distinct sources")
    (a, b), (a2, b2) = pair.rows(data.n_streams)
    y = data.data
    return [terms(y[i], y[j], d).sum(axis=1) for i, j in ((a, b), (b, a), (a2, b2), (b2, a2))]


def _rotated_cost(
    data: RealStackedBlock,
    pair: RowPair,
    kind: RotationKind,
    c: float,
    s: float,
    d: float
) -> float:
    return float(np.sum(cme(preview_pair(data, pair, kind, c, s), d)))


def _real_roots(poly: Polynomial) -> Iterable[float]:
    for root in poly.roots():
        if abs(root.imag) <= IMAG_TOL * max(1.0, abs(root)):
            yield float(root.real)


def _least_costly(cost: ScalarCost, candidates: Iterable[float]) -> float:
    """Candidate with the lowest cost; 0 unless something strictly beats it."""
    best, best_cost = 0.0, cost(0.0)
    for x in candidates:
        value = cost(x)
        if value < best_cost:
            best, best_cost = x, value
    return best


def _check_spacing(d: float) -> None:
    if not d > 0:
        raise InvalidArgumentError(f"half spacing must be positive, got {d}")
