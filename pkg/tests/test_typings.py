"""Tests for the validated domain types."""

import math

import numpy as np
import pytest

from common.errors import ConfigError, DimensionMismatchError, InvalidArgumentError
from common.typings import (
    Algorithm,
    AlgorithmConfig,
    ExperimentConfig,
    PairFamily,
    PlaneRotation,
    RealStackedBlock,
    RotationKind,
    RowPair,
    SampleBlock,
    SolverMode,
    StructuredSeparator,
)

N_STREAMS = 3


def experiment(**overrides) -> ExperimentConfig:
    values = dict(n_tx=2, n_rx=3, n_samples=[100], snr_db=[20.0], constellation_order=16,
                  algorithms=[AlgorithmConfig.default(Algorithm.G_MMA)], n_trials=1,
                  base_seed=0)
    values.update(overrides)
    return ExperimentConfig(**values)


class TestSampleBlock:
    """Validate sample block coercion and checks."""

    def test_coerces_to_complex(self) -> None:
        """Verify that real input is stored as complex."""
        block = SampleBlock(np.ones((2, 3)))
        assert block.data.dtype == complex
        assert (block.rows, block.cols) == (2, 3)

    def test_rejects_vector(self) -> None:
        """Verify that 1-D input is refused."""
        with pytest.raises(DimensionMismatchError):
            SampleBlock(np.ones(4))

    def test_rejects_non_finite(self) -> None:
        """Verify that NaN entries are refused."""
        with pytest.raises(InvalidArgumentError):
            SampleBlock(np.array([[1.0, np.nan]]))


class TestStackedTypes:
    """Validate the stacked block and structured separator."""

    def test_odd_row_count(self) -> None:
        """Verify that a stacked block needs an even row count."""
        with pytest.raises(DimensionMismatchError):
            RealStackedBlock(np.zeros((3, 5)))

    def test_identity_separator(self) -> None:
        """Verify that the identity separator maps to the complex identity."""
        sep = StructuredSeparator.identity(N_STREAMS)
        np.testing.assert_array_equal(sep.complex_matrix(), np.eye(N_STREAMS))
        assert sep.structure_residual() == 0.0

    def test_enforce_structure(self, rng: np.random.Generator) -> None:
        """Verify that enforcing structure zeroes the residual."""
        sep = StructuredSeparator(rng.standard_normal((2 * N_STREAMS, 2 * N_STREAMS)))
        assert sep.structure_residual() > 0
        sep.enforce_structure()
        assert sep.structure_residual() == pytest.approx(0.0, abs=1e-15)


class TestPlaneRotation:
    """Validate rotation parameter checks."""

    def test_valid_givens(self) -> None:
        """Verify that a unit (c, s) pair is accepted."""
        PlaneRotation(RotationKind.GIVENS, 0, 1, math.cos(0.3), math.sin(0.3))

    def test_invalid_givens(self) -> None:
        """Verify that c^2 + s^2 != 1 is refused."""
        with pytest.raises(InvalidArgumentError):
            PlaneRotation(RotationKind.GIVENS, 0, 1, 1.0, 0.5)

    def test_invalid_hyperbolic(self) -> None:
        """Verify that c^2 - s^2 != 1 is refused."""
        with pytest.raises(InvalidArgumentError):
            PlaneRotation(RotationKind.HYPERBOLIC, 0, 1, 1.0, 0.5)

    def test_normalization_needs_zero_s(self) -> None:
        """Verify that a normalization carries only a positive scale."""
        with pytest.raises(InvalidArgumentError):
            PlaneRotation(RotationKind.NORMALIZATION, 0, 0, 2.0, 0.1)


class TestRowPair:
    """Validate the stacked rows addressed by each family."""

    @pytest.mark.parametrize("family, expected", [
        (PairFamily.DIRECT, ((0, 2), (3, 5))),
        (PairFamily.CROSS, ((0, 5), (2, 3))),
    ])
    def test_rows(self, family: PairFamily, expected: tuple) -> None:
        """Verify the stacked indices of the paired families."""
        assert RowPair(0, 2, family).rows(N_STREAMS) == expected

    def test_diagonal_rows(self) -> None:
        """Verify the single couple of the diagonal family."""
        assert RowPair(1, 1, PairFamily.DIAGONAL).rows(N_STREAMS) == ((1, 4),)

    def test_diagonal_needs_equal_indices(self) -> None:
        """Verify that p != q is refused for the diagonal family."""
        with pytest.raises(InvalidArgumentError):
            RowPair(0, 1, PairFamily.DIAGONAL)

    def test_out_of_range(self) -> None:
        """Verify that indices beyond N_t are refused."""
        with pytest.raises(InvalidArgumentError):
            RowPair(0, 3, PairFamily.DIRECT).rows(N_STREAMS)


class TestAlgorithmConfig:
    """Validate algorithm defaults and labels."""

    def test_defaults(self) -> None:
        """Verify 5 sweeps for MMA and 5 + 3 for AMA."""
        assert AlgorithmConfig.default(Algorithm.HG_MMA).n_sweeps == 5
        ama = AlgorithmConfig.default(Algorithm.HG_AMA)
        assert (ama.n_sweeps, ama.n_warmstart) == (8, 5)

    def test_label(self) -> None:
        """Verify the generated label."""
        cfg = AlgorithmConfig(Algorithm.G_AMA, 10, solver_mode=SolverMode.EXACT)
        assert cfg.label == "g_ama-exact-10"

    def test_custom_label(self) -> None:
        """Verify that an explicit label is kept."""
        assert AlgorithmConfig(Algorithm.G_MMA, 5, label="mine").label == "mine"

    def test_warmstart_bound(self) -> None:
        """Verify that more warm-start sweeps than sweeps is refused."""
        with pytest.raises(InvalidArgumentError):
            AlgorithmConfig(Algorithm.G_AMA, 4, n_warmstart=5)

    def test_zero_sweeps(self) -> None:
        """Verify that at least one sweep is required."""
        with pytest.raises(InvalidArgumentError):
            AlgorithmConfig(Algorithm.G_MMA, 0)


class TestExperimentConfig:
    """Validate experiment configuration invariants."""

    def test_valid(self) -> None:
        """Verify that the reference configuration is accepted."""
        assert experiment().n_points == 1

    @pytest.mark.parametrize("overrides", [
        {"n_tx": 4},
        {"n_trials": 0},
        {"snr_db": [20.0, 10.0]},
        {"n_samples": []},
        {"algorithms": []},
        {"condition_bound": 1.0},
        {"n_threads": 0},
        {"algorithms": [AlgorithmConfig.default(Algorithm.G_MMA),
                        AlgorithmConfig.default(Algorithm.G_MMA)]},
    ])
    def test_invalid(self, overrides: dict) -> None:
        """Verify that inconsistent configurations raise ConfigError."""
        with pytest.raises(ConfigError):
            experiment(**overrides)
