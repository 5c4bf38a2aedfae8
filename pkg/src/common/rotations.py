import logging
import math
from typing import Tuple

import numpy as np

from .errors import DimensionMismatchError, InvalidArgumentError
from .typings import (
    PairFamily,
    PlaneRotation,
    RealStackedBlock,
    RotationKind,
    RowPair,
    SampleBlock,
    StructuredSeparator,
)

logger = logging.getLogger(__name__)


def stack(block: SampleBlock) -> RealStackedBlock:
    return RealStackedBlock(np.vstack([block.data.real, block.data.imag]))


def unstack(block: RealStackedBlock) -> SampleBlock:
    n = block.n_streams
    return SampleBlock(block.data[:n] + 1j * block.data[n:])


def rotate_values(
    y_a: np.ndarray,
    y_b: np.ndarray,
    kind: RotationKind,
    c: float | np.ndarray,
    s: float | np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """New values of the two touched rows; broadcasts over c and s.

    Givens:     z_a = c y_a + s y_b,  z_b = -s y_a + c y_b
    hyperbolic: z_a = c y_a + s y_b,  z_b =  s y_a + c y_b
    """
    if kind is RotationKind.GIVENS:
        return c * y_a + s * y_b, c * y_b - s * y_a
    if kind is RotationKind.HYPERBOLIC:
        return c * y_a + s * y_b, c * y_b + s * y_a
    raise InvalidArgumentError(f"{kind.value} is not a plane rotation")


def pair_rotations(
    pair: RowPair,
    n_streams: int,
    kind: RotationKind,
    c: float,
    s: float
) -> Tuple[PlaneRotation, PlaneRotation]:
    """The two rotations realizing one structure-preserving step.

    The cross hyperbolic family uses +gamma on (p, q+N) and -gamma on (q, p+N);
    the diagonal family repeats its single rotation.
    """
    rows = pair.rows(n_streams)
    rot_a = PlaneRotation(kind, rows[0][0], rows[0][1], c, s)
    if pair.family is PairFamily.DIAGONAL:
        return rot_a, rot_a
    s_b = -s if (kind is RotationKind.HYPERBOLIC and pair.family is PairFamily.CROSS) else s
    return rot_a, PlaneRotation(kind, rows[1][0], rows[1][1], c, s_b)


def preview_pair(
    data: RealStackedBlock,
    pair: RowPair,
    kind: RotationKind,
    c: float | np.ndarray,
    s: float | np.ndarray
) -> np.ndarray:
    """Touched rows after the pair is applied, without mutating data.

    With scalar c, s the result is (rows, N_s); with c, s of shape (K, 1) it is
    (K, rows, N_s).
    """
    flip = kind is RotationKind.HYPERBOLIC and pair.family is PairFamily.CROSS
    out = []
    for index, (a, b) in enumerate(pair.rows(data.n_streams)):
        sign = -1.0 if (flip and index == 1) else 1.0
        z_a, z_b = rotate_values(data.data[a], data.data[b], kind, c, sign * s)
        out.extend([z_a, z_b])
    return np.stack(out, axis=-2)


def apply_rotation_pair(
    data: RealStackedBlock,
    sep: StructuredSeparator,
    rot_a: PlaneRotation,
    rot_b: PlaneRotation
) -> None:
    """Left-multiply data and separator by both rotations, in place.

    Raises:
        InvalidArgumentError: if (rot_a, rot_b) is not a structure-preserving pattern
    """
    _check_conforming(data, sep)
    _check_pattern(rot_a, rot_b, data.n_streams)
    _rotate_rows(data.data, rot_a)
    _rotate_rows(sep.data, rot_a)
    if (rot_b.p, rot_b.q) != (rot_a.p, rot_a.q):
        _rotate_rows(data.data, rot_b)
        _rotate_rows(sep.data, rot_b)


def apply_pair(
    data: RealStackedBlock,
    sep: StructuredSeparator,
    pair: RowPair,
    kind: RotationKind,
    c: float,
    s: float
) -> PlaneRotation:
    """Build the rotations of a row pair, apply them and return the first."""
    rot_a, rot_b = pair_rotations(pair, data.n_streams, kind, c, s)
    apply_rotation_pair(data, sep, rot_a, rot_b)
    return rot_a


def apply_normalization(
    data: RealStackedBlock,
    sep: StructuredSeparator,
    lambdas: np.ndarray
) -> None:
    """Scale rows p and p+N of data and separator by lambda_p."""
    _check_conforming(data, sep)
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.shape != (data.n_streams,):
        raise DimensionMismatchError(
            f"need {data.n_streams} normalization factors, got shape {lambdas.shape}")
    if not np.all(np.isfinite(lambdas)) or np.any(lambdas <= 0):
        raise InvalidArgumentError(f"normalization factors must be positive, got {lambdas}")
    scale = np.concatenate([lambdas, lambdas])[:, None]
    data.data *= scale
    sep.data *= scale


def _rotate_rows(matrix: np.ndarray, rot: PlaneRotation) -> None:
    rows = matrix[[rot.p, rot.q]]
    z_a, z_b = rotate_values(rows[0], rows[1], rot.kind, rot.c, rot.s)
    matrix[rot.p] = z_a
    matrix[rot.q] = z_b


def _check_conforming(data: RealStackedBlock, sep: StructuredSeparator) -> None:
    if sep.data.shape != (2 * data.n_streams, 2 * data.n_streams):
        raise DimensionMismatchError(
            f"separator {sep.data.shape} does not match {data.n_streams} streams")


def _check_pattern(rot_a: PlaneRotation, rot_b: PlaneRotation, n: int) -> None:
    if rot_a.kind is RotationKind.NORMALIZATION or rot_a.kind is not rot_b.kind:
        raise InvalidArgumentError(
            f"cannot pair {rot_a.kind.value} with {rot_b.kind.value}")
    for rot in (rot_a, rot_b):
        if max(rot.p, rot.q) >= 2 * n or rot.p == rot.q:
            raise InvalidArgumentError(f"bad rotation rows ({rot.p}, {rot.q}) for {n} streams")

    same_c = math.isclose(rot_a.c, rot_b.c, rel_tol=1e-12, abs_tol=1e-15)
    same_s = math.isclose(rot_a.s, rot_b.s, rel_tol=1e-12, abs_tol=1e-15)
    negated_s = math.isclose(rot_a.s, -rot_b.s, rel_tol=1e-12, abs_tol=1e-15)
    p, q = rot_a.p, rot_a.q

    if (rot_b.p, rot_b.q) == (p, q):
        # single (p, p+N) rotation, Givens only
        if q == p + n and p < n and rot_a.kind is RotationKind.GIVENS and same_c and same_s:
            return
    elif p < n and q < n:
        if (rot_b.p, rot_b.q) == (p + n, q + n) and same_c and same_s:
            return
    elif p < n <= q and q != p + n:
        if (rot_b.p, rot_b.q) == (q - n, p + n) and same_c:
            if rot_a.kind is RotationKind.GIVENS and same_s:
                return
            if rot_a.kind is RotationKind.HYPERBOLIC and negated_s:
                return
    raise InvalidArgumentError(
        f"({rot_a.p}, {rot_a.q}) / ({rot_b.p}, {rot_b.q}) is not a structure-preserving "
        f"{rot_a.kind.value} pair for {n} streams")
