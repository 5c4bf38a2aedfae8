import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np

from .errors import ConfigError, DimensionMismatchError, InvalidArgumentError


class WhiteningMode(str, Enum):
    COVARIANCE_WHITENING = "covariance_whitening"
    SUBSPACE_PROJECTION = "subspace_projection"


class SolverMode(str, Enum):
    EXACT = "exact"
    APPROXIMATE = "approximate"


class Criterion(str, Enum):
    MM = "mm"
    AM = "am"


class RotationKind(str, Enum):
    GIVENS = "givens"
    HYPERBOLIC = "hyperbolic"
    NORMALIZATION = "normalization"


class PairFamily(str, Enum):
    DIRECT = "direct"        # {(p, q), (p+N, q+N)}
    CROSS = "cross"          # {(p, q+N), (q, p+N)}
    DIAGONAL = "diagonal"    # (p, p+N) on its own


class AmaFamily(str, Enum):
    GIVENS = "givens"
    HYPERBOLIC_PAIR1 = "hyperbolic_pair1"
    HYPERBOLIC_PAIR2 = "hyperbolic_pair2"


class Algorithm(str, Enum):
    G_MMA = "g_mma"
    HG_MMA = "hg_mma"
    G_AMA = "g_ama"
    HG_AMA = "hg_ama"

    @property
    def is_ama(self) -> bool:
        return self in (Algorithm.G_AMA, Algorithm.HG_AMA)

    @property
    def uses_hyperbolic(self) -> bool:
        return self in (Algorithm.HG_MMA, Algorithm.HG_AMA)


@dataclass(frozen=True)
class ConstellationSpec:
    order: int                # L, number of alphabet points
    half_spacing: float       # d, half the minimum distance after normalization
    scale: float              # c, integer lattice -> normalized alphabet
    dispersion: float         # E[s_R^4] / E[s_R^2] of the normalized alphabet
    raw_dispersion: float     # same ratio on the integer lattice

    @property
    def side(self) -> int:
        return math.isqrt(self.order)

    @property
    def levels(self) -> np.ndarray:
        """Odd integer lattice levels -(sqrt(L)-1) .. sqrt(L)-1."""
        return np.arange(-(self.side - 1), self.side, 2, dtype=float)

    def points(self) -> np.ndarray:
        """Every normalized alphabet point, real-major order."""
        re, im = np.meshgrid(self.levels, self.levels, indexing="ij")
        return (self.scale * (re + 1j * im)).ravel()


@dataclass(frozen=True)
class SampleBlock:
    data: np.ndarray   # complex, rows x N_s

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=complex)
        if data.ndim != 2:
            raise DimensionMismatchError(
                f"SampleBlock needs a 2-D matrix, got shape {data.shape}")
        if data.shape[1] < 1:
            raise InvalidArgumentError("SampleBlock needs at least one sample")
        if not np.all(np.isfinite(data)):
            raise InvalidArgumentError("SampleBlock entries must be finite")
        object.__setattr__(self, "data", data)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class ChannelInstance:
    mixing: np.ndarray                 # A, N_r x N_t
    noise_variance: float = 0.0        # sigma_n^2
    condition_bound: float = math.inf  # kappa_max

    @property
    def n_rx(self) -> int:
        return self.mixing.shape[0]

    @property
    def n_tx(self) -> int:
        return self.mixing.shape[1]


@dataclass(frozen=True)
class Whitener:
    matrix_b: np.ndarray   # B, N_t x N_r
    mode: WhiteningMode

    @property
    def n_sources(self) -> int:
        return self.matrix_b.shape[0]

    @property
    def n_rx(self) -> int:
        return self.matrix_b.shape[1]


@dataclass
class RealStackedBlock:
    """Real parts of every stream stacked over their imaginary parts.

    Mutated in place by the rotation operations.
    """
    data: np.ndarray   # 2N_t x N_s, float64

    def __post_init__(self) -> None:
        if self.data.ndim != 2 or self.data.shape[0] % 2:
            raise DimensionMismatchError(
                f"stacked data needs an even row count, got shape {self.data.shape}")

    @property
    def n_streams(self) -> int:
        return self.data.shape[0] // 2

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]


@dataclass
class StructuredSeparator:
    """2N_t x 2N_t real separator holding [[V_R, -V_I], [V_I, V_R]]."""
    data: np.ndarray

    @classmethod
    def identity(cls, n_streams: int) -> "StructuredSeparator":
        return cls(np.eye(2 * n_streams))

    @property
    def n_streams(self) -> int:
        return self.data.shape[0] // 2

    @property
    def v_real(self) -> np.ndarray:
        n = self.n_streams
        return self.data[:n, :n]

    @property
    def v_imag(self) -> np.ndarray:
        n = self.n_streams
        return self.data[n:, :n]

    def complex_matrix(self) -> np.ndarray:
        return self.v_real + 1j * self.v_imag

    def structure_residual(self) -> float:
        n = self.n_streams
        top_left, top_right = self.data[:n, :n], self.data[:n, n:]
        bottom_left, bottom_right = self.data[n:, :n], self.data[n:, n:]
        return float(max(np.max(np.abs(top_left - bottom_right)),
                         np.max(np.abs(top_right + bottom_left))))

    def enforce_structure(self) -> None:
        n = self.n_streams
        v_r = 0.5 * (self.data[:n, :n] + self.data[n:, n:])
        v_i = 0.5 * (self.data[n:, :n] - self.data[:n, n:])
        self.data[:n, :n] = v_r
        self.data[n:, n:] = v_r
        self.data[n:, :n] = v_i
        self.data[:n, n:] = -v_i


@dataclass(frozen=True)
class PlaneRotation:
    kind: RotationKind
    p: int
    q: int
    c: float   # cos(theta), cosh(gamma) or lambda_p
    s: float   # sin(theta), sinh(gamma) or 0

    def __post_init__(self) -> None:
        if self.p < 0 or self.q < 0:
            raise InvalidArgumentError(f"negative row index in ({self.p}, {self.q})")
        if self.kind is RotationKind.GIVENS:
            if abs(self.c * self.c + self.s * self.s - 1.0) > 1e-12:
                raise InvalidArgumentError(f"not a Givens pair: c={self.c}, s={self.s}")
        elif self.kind is RotationKind.HYPERBOLIC:
            if abs(self.c * self.c - self.s * self.s - 1.0) > 1e-12 * max(1.0, self.c * self.c):
                raise InvalidArgumentError(f"not a hyperbolic pair: c={self.c}, s={self.s}")
            if self.c < 1.0:
                raise InvalidArgumentError(f"cosh must be >= 1, got {self.c}")
        else:
            if not (self.c > 0 and math.isfinite(self.c)) or self.s != 0.0:
                raise InvalidArgumentError(
                    f"normalization needs c > 0 and s = 0, got c={self.c}, s={self.s}")


@dataclass(frozen=True)
class RowPair:
    """Source indices p, q (0-based, < N_t) and the stacked-row family they address."""
    p: int
    q: int
    family: PairFamily

    def __post_init__(self) -> None:
        if self.p < 0 or self.q < 0:
            raise InvalidArgumentError(f"negative source index in ({self.p}, {self.q})")
        if (self.family is PairFamily.DIAGONAL) != (self.p == self.q):
            raise InvalidArgumentError(
                f"{self.family.value} pair cannot use p={self.p}, q={self.q}")

    def rows(self, n_streams: int) -> Tuple[Tuple[int, int], ...]:
        """Stacked (row, row) index pairs touched by the pair."""
        if max(self.p, self.q) >= n_streams:
            raise InvalidArgumentError(
                f"source index out of range for {n_streams} streams: ({self.p}, {self.q})")
        p, q, n = self.p, self.q, n_streams
        if self.family is PairFamily.DIRECT:
            return (p, q), (p + n, q + n)
        if self.family is PairFamily.CROSS:
            return (p, q + n), (q, p + n)
        return ((p, p + n),)


@dataclass(frozen=True)
class QuadraticFormAccumulator:
    t_matrix: np.ndarray   # T, symmetric 2x2


@dataclass(frozen=True)
class HyperbolicSystem:
    r_matrix: np.ndarray   # R, symmetric 2x2
    r_vector: np.ndarray   # r, length 2


@dataclass(frozen=True)
class AmaPolynomial:
    coefficients: Tuple[float, float, float, float, float]   # C0..C4
    half_spacing: float
    family: AmaFamily

    def __post_init__(self) -> None:
        if len(self.coefficients) != 5 or not all(map(math.isfinite, self.coefficients)):
            raise InvalidArgumentError(f"bad AMA coefficients {self.coefficients}")


@dataclass(frozen=True)
class AlgorithmConfig:
    algorithm: Algorithm
    n_sweeps: int
    n_warmstart: int = 5
    solver_mode: SolverMode = SolverMode.APPROXIMATE
    whitening_mode: WhiteningMode = WhiteningMode.COVARIANCE_WHITENING
    label: Optional[str] = None

    def __post_init__(self) -> None:
        if self.n_sweeps < 1:
            raise InvalidArgumentError(f"n_sweeps must be >= 1, got {self.n_sweeps}")
        if self.algorithm.is_ama and not 0 <= self.n_warmstart <= self.n_sweeps:
            raise InvalidArgumentError(
                f"n_warmstart must lie in [0, {self.n_sweeps}], got {self.n_warmstart}")
        if self.label is None:
            object.__setattr__(
                self, "label",
                f"{self.algorithm.value}-{self.solver_mode.value}-{self.n_sweeps}")

    @classmethod
    def default(cls, algorithm: Algorithm, **overrides) -> "AlgorithmConfig":
        n_sweeps = 8 if algorithm.is_ama else 5
        return cls(algorithm=algorithm, **{"n_sweeps": n_sweeps, **overrides})


@dataclass
class SeparationReport:
    separator: StructuredSeparator
    v: np.ndarray             # complex N_t x N_t recovered from the separator
    combined_w: np.ndarray    # W = V.B, N_t x N_r
    separated: SampleBlock
    cost_per_sweep: List[float]
    wall_time: float          # seconds

    @property
    def sweeps_used(self) -> int:
        return len(self.cost_per_sweep)


@dataclass(frozen=True)
class GlobalSystem:
    g_matrix: np.ndarray     # G = W.A
    assignment: np.ndarray   # assignment[j] = source feeding output j
    gains: np.ndarray        # g_{j, assignment[j]}


@dataclass
class ExperimentConfig:
    n_tx: int
    n_rx: int
    n_samples: List[int]
    snr_db: List[float]
    constellation_order: int
    algorithms: List[AlgorithmConfig]
    n_trials: int
    base_seed: int
    condition_bound: float = 100.0
    output_path: str = "results/trials.csv"
    summary_path: Optional[str] = None
    n_threads: int = 1
    record_timing: bool = False

    def __post_init__(self) -> None:
        if not 1 <= self.n_tx <= self.n_rx:
            raise ConfigError(f"need 1 <= n_tx <= n_rx, got n_tx={self.n_tx}, n_rx={self.n_rx}")
        if self.n_trials < 1:
            raise ConfigError(f"n_trials must be >= 1, got {self.n_trials}")
        if self.n_threads < 1:
            raise ConfigError(f"n_threads must be >= 1, got {self.n_threads}")
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        labels = [algo.label for algo in self.algorithms]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"algorithm labels must be unique, got {labels}")
        for name in ("n_samples", "snr_db"):
            values = getattr(self, name)
            if not values:
                raise ConfigError(f"{name} must not be empty")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ConfigError(f"{name} must be strictly increasing, got {values}")
        if self.condition_bound <= 1:
            raise ConfigError(f"condition_bound must exceed 1, got {self.condition_bound}")

    @property
    def n_points(self) -> int:
        return len(self.snr_db) * len(self.n_samples)


@dataclass
class TrialRecord:
    trial_index: int
    seed: int
    algorithm: str
    snr_db: float
    n_samples: int
    sinr_db: float
    ser: float
    sweeps_used: int
    cost_trajectory: List[float] = field(default_factory=list)
    wall_time: Optional[float] = None
    sinr_trajectory: List[float] = field(default_factory=list)
    error: str = ""


RotationHook = Callable[[PlaneRotation, RealStackedBlock], None]
SweepHook = Callable[[int, StructuredSeparator], None]
ScalarCost = Callable[[float], float]
