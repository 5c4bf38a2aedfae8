"""Tests for the multimodulus rotation solvers."""

import copy
import math

import numpy as np
import pytest

from algorithms.mma import (
    GAMMA_BOUND,
    accumulate_givens_form,
    accumulate_hyperbolic_system,
    compute_normalization,
    hyperbolic_cost,
    mm_cost,
    solve_givens_theta,
    solve_hyperbolic_approx,
    solve_hyperbolic_exact,
    solve_hyperbolic_lagrangian,
)
from algorithms.oracle import grid_min_givens, grid_min_hyperbolic, naive_mm_cost, whitened_block
from common.errors import InvalidArgumentError
from common.rotations import apply_normalization, apply_pair
from common.typings import (
    Criterion,
    HyperbolicSystem,
    PairFamily,
    QuadraticFormAccumulator,
    RealStackedBlock,
    RotationKind,
    RowPair,
    StructuredSeparator,
)

ORACLE_SEEDS = range(8)
N_STREAMS, N_SAMPLES = 3, 100
COST_TOL = 1e-6
GIVENS_PAIRS = [RowPair(0, 0, PairFamily.DIAGONAL), RowPair(0, 1, PairFamily.DIRECT),
                RowPair(1, 2, PairFamily.CROSS)]
HYPERBOLIC_PAIRS = [RowPair(0, 1, PairFamily.DIRECT), RowPair(0, 2, PairFamily.CROSS)]


def rotated_cost(data: RealStackedBlock, pair: RowPair, kind: RotationKind,
                 params, dispersion: float) -> float:
    rotated = copy.deepcopy(data)
    apply_pair(rotated, StructuredSeparator.identity(data.n_streams), pair, kind, *params)
    return mm_cost(rotated, dispersion)


class TestMmCost:
    """Validate the vectorized multimodulus cost."""

    def test_matches_naive(self, block, spec16) -> None:
        """Verify agreement with the loop evaluator."""
        assert mm_cost(block, spec16.dispersion) == pytest.approx(
            naive_mm_cost(block, spec16.dispersion), rel=1e-9)

    def test_row_subset(self, block, spec16) -> None:
        """Verify that row costs add up to the total."""
        rows = range(2 * N_STREAMS)
        total = sum(mm_cost(block, spec16.dispersion, [row]) for row in rows)
        assert total == pytest.approx(mm_cost(block, spec16.dispersion))


class TestGivensSolver:
    """Validate the closed-form Givens MM rotation."""

    @pytest.mark.parametrize("pair", GIVENS_PAIRS)
    def test_matches_grid_oracle(self, spec16, pair: RowPair) -> None:
        """Verify that the eigenvector angle is as good as a 1e-4 grid search."""
        for seed in ORACLE_SEEDS:
            data = whitened_block(spec16, N_STREAMS, N_SAMPLES, seed)
            params = solve_givens_theta(accumulate_givens_form(data, pair))
            cost = rotated_cost(data, pair, RotationKind.GIVENS, params, spec16.dispersion)
            _, oracle = grid_min_givens(data, pair, Criterion.MM, spec16.dispersion)
            assert cost <= oracle + COST_TOL * max(1.0, oracle)
            assert oracle - cost <= COST_TOL * max(1.0, oracle)

    def test_angle_range(self, block) -> None:
        """Verify a unit (c, s) with |theta| <= pi/4."""
        c, s = solve_givens_theta(accumulate_givens_form(block, RowPair(0, 1, PairFamily.DIRECT)))
        assert c * c + s * s == pytest.approx(1.0)
        assert c >= math.cos(math.pi / 4) - 1e-12

    def test_tie_returns_identity(self) -> None:
        """Verify the identity when both eigenvalues coincide."""
        assert solve_givens_theta(QuadraticFormAccumulator(2.0 * np.eye(2))) == (1.0, 0.0)

    def test_never_worsens(self, block, spec16) -> None:
        """Verify that the rotation does not raise the cost."""
        for pair in GIVENS_PAIRS:
            params = solve_givens_theta(accumulate_givens_form(block, pair))
            after = rotated_cost(block, pair, RotationKind.GIVENS, params, spec16.dispersion)
            assert after <= mm_cost(block, spec16.dispersion) + 1e-9

    def test_single_sample_form(self) -> None:
        """Verify T for one sample with y_a = 1 and y_b = 0."""
        data = RealStackedBlock(np.array([[1.0], [0.0]]))
        form = accumulate_givens_form(data, RowPair(0, 0, PairFamily.DIAGONAL))
        np.testing.assert_allclose(form.t_matrix, [[0.25, 0.0], [0.0, 0.0]])

    def test_diagonal_form_angle(self) -> None:
        """Verify theta = pi/4 when the smaller eigenvalue belongs to sin 2theta."""
        c, s = solve_givens_theta(QuadraticFormAccumulator(np.diag([2.0, 1.0])))
        assert c == pytest.approx(1.0 / math.sqrt(2.0))
        assert s == pytest.approx(1.0 / math.sqrt(2.0))


class TestHyperbolicSystem:
    """Validate the hyperbolic quadratic model."""

    @pytest.mark.parametrize("pair", HYPERBOLIC_PAIRS)
    def test_cost_model(self, block, spec16, pair: RowPair) -> None:
        """Verify that the model tracks the true MM cost change up to the factor 2."""
        gamma = 0.3
        system = accumulate_hyperbolic_system(block, pair, spec16.dispersion)
        true_change = (rotated_cost(block, pair, RotationKind.HYPERBOLIC,
                                    (math.cosh(gamma), math.sinh(gamma)), spec16.dispersion)
                       - mm_cost(block, spec16.dispersion))
        model_change = 2.0 * (hyperbolic_cost(system, gamma) - hyperbolic_cost(system, 0.0))
        assert true_change == pytest.approx(model_change, rel=1e-9, abs=1e-9)

    def test_diagonal_refused(self, block) -> None:
        """Verify that the diagonal family has no hyperbolic form."""
        with pytest.raises(InvalidArgumentError):
            accumulate_hyperbolic_system(block, RowPair(0, 0, PairFamily.DIAGONAL))


class TestHyperbolicSolvers:
    """Validate the exact (Lagrangian) and approximate hyperbolic solutions."""

    @pytest.mark.parametrize("pair", HYPERBOLIC_PAIRS)
    def test_exact_matches_grid_oracle(self, spec16, pair: RowPair) -> None:
        """Verify that the exact solution is as good as a grid over [-1, 1]."""
        for seed in ORACLE_SEEDS:
            data = whitened_block(spec16, N_STREAMS, N_SAMPLES, seed)
            system = accumulate_hyperbolic_system(data, pair, spec16.dispersion)
            params = solve_hyperbolic_exact(system)
            cost = rotated_cost(data, pair, RotationKind.HYPERBOLIC, params, spec16.dispersion)
            _, oracle = grid_min_hyperbolic(data, pair, Criterion.MM, spec16.dispersion)
            assert cost <= oracle + COST_TOL * max(1.0, oracle)

    def test_lagrangian_on_hyperbola(self, block, spec16) -> None:
        """Verify u_1^2 - u_2^2 = 1 and u_1 >= 1."""
        system = accumulate_hyperbolic_system(block, RowPair(0, 1, PairFamily.DIRECT),
                                              spec16.dispersion)
        u, _ = solve_hyperbolic_lagrangian(system)
        assert u is not None
        assert u[0] ** 2 - u[1] ** 2 == pytest.approx(1.0, abs=1e-9)
        assert u[0] >= 1.0 - 1e-12

    @pytest.mark.parametrize("solver", [solve_hyperbolic_exact, solve_hyperbolic_approx])
    def test_clamped_and_non_worsening(self, block, spec16, solver) -> None:
        """Verify |gamma| <= GAMMA_BOUND and no model-cost increase."""
        for pair in HYPERBOLIC_PAIRS:
            system = accumulate_hyperbolic_system(block, pair, spec16.dispersion)
            c, s = solver(system)
            gamma = math.asinh(s)
            assert c == pytest.approx(math.cosh(gamma))
            assert abs(gamma) <= GAMMA_BOUND + 1e-12
            assert hyperbolic_cost(system, gamma) <= hyperbolic_cost(system, 0.0) + 1e-9

    def test_approx_close_to_exact(self, spec16) -> None:
        """Verify that both solutions agree on well-whitened data."""
        pair = RowPair(0, 1, PairFamily.DIRECT)
        data = whitened_block(spec16, N_STREAMS, 2000, seed=3)
        system = accumulate_hyperbolic_system(data, pair, spec16.dispersion)
        _, s_exact = solve_hyperbolic_exact(system)
        _, s_approx = solve_hyperbolic_approx(system)
        assert abs(math.asinh(s_exact) - math.asinh(s_approx)) < 0.05

    def test_degenerate_system(self) -> None:
        """Verify the identity for a zero system."""
        system = HyperbolicSystem(np.zeros((2, 2)), np.zeros(2))
        assert solve_hyperbolic_exact(system) == (1.0, 0.0)
        assert solve_hyperbolic_approx(system) == (1.0, 0.0)

    def test_exact_stays_at_target(self) -> None:
        """Verify gamma = 0 for R = I and r = [1, 0]."""
        system = HyperbolicSystem(np.eye(2), np.array([1.0, 0.0]))
        c, s = solve_hyperbolic_exact(system)
        assert c == pytest.approx(1.0, abs=1e-9)
        assert s == pytest.approx(0.0, abs=1e-9)

    def test_approx_zero_argument(self) -> None:
        """Verify gamma = 0 when r_2 equals R_12."""
        system = HyperbolicSystem(np.array([[2.0, 0.3], [0.3, 1.0]]), np.array([1.0, 0.3]))
        assert solve_hyperbolic_approx(system) == (1.0, 0.0)

    @pytest.mark.parametrize("sign", [1.0, -1.0])
    def test_approx_argument_clamp(self, monkeypatch: pytest.MonkeyPatch, sign: float) -> None:
        """Verify that an atanh argument beyond one is held at +-0.99."""
        monkeypatch.setattr("algorithms.mma.mma.GAMMA_BOUND", 2.0)
        system = HyperbolicSystem(np.eye(2), np.array([1.5, sign * 50.0]))
        _, s = solve_hyperbolic_approx(system)
        assert math.asinh(s) == pytest.approx(sign * 0.5 * math.atanh(0.99))

    @pytest.mark.parametrize("sign", [1.0, -1.0])
    def test_approx_gamma_bound(self, sign: float) -> None:
        """Verify that a clamped argument still respects GAMMA_BOUND."""
        system = HyperbolicSystem(np.eye(2), np.array([1.5, sign * 5.0]))
        c, s = solve_hyperbolic_approx(system)
        assert c == pytest.approx(math.cosh(GAMMA_BOUND))
        assert s == pytest.approx(sign * math.sinh(GAMMA_BOUND))


class TestNormalization:
    """Validate the per-stream normalization factors."""

    def test_balances_moments(self, block) -> None:
        """Verify sum y^2 = sum y^4 per stream after scaling."""
        sep = StructuredSeparator.identity(N_STREAMS)
        apply_normalization(block, sep, compute_normalization(block))
        squares = block.data ** 2
        second = squares[:N_STREAMS].sum(axis=1) + squares[N_STREAMS:].sum(axis=1)
        fourth = (squares[:N_STREAMS] ** 2).sum(axis=1) + (squares[N_STREAMS:] ** 2).sum(axis=1)
        np.testing.assert_allclose(second, fourth, rtol=1e-10)

    def test_silent_stream(self) -> None:
        """Verify lambda = 1 for an all-zero stream."""
        data = RealStackedBlock(np.zeros((4, 10)))
        data.data[0] = 1.0
        np.testing.assert_allclose(compute_normalization(data), [1.0, 1.0])

    def test_scaling(self, block) -> None:
        """Verify that scaling the data by c scales lambda by 1/c."""
        scaled = RealStackedBlock(3.0 * block.data)
        np.testing.assert_allclose(compute_normalization(scaled),
                                   compute_normalization(block) / 3.0, rtol=1e-12)

    def test_matches_grid(self, block) -> None:
        """Verify that lambda minimizes sum ((lambda y)^2 - 1)^2 over a fine grid."""
        lambdas = compute_normalization(block)
        for p in range(N_STREAMS):
            y = np.concatenate([block.data[p], block.data[p + N_STREAMS]])
            grid = np.linspace(0.5, 1.5, 4001) * lambdas[p]
            costs = (((grid[:, None] * y[None, :]) ** 2 - 1.0) ** 2).sum(axis=1)
            cost = float((((lambdas[p] * y) ** 2 - 1.0) ** 2).sum())
            assert cost <= costs.min() + COST_TOL * max(1.0, costs.min())
            assert grid[np.argmin(costs)] == pytest.approx(lambdas[p], rel=1e-3)

    def test_stream_subset(self, block) -> None:
        """Verify that only the listed streams are scaled."""
        full = compute_normalization(block)
        partial = compute_normalization(block, [1])
        np.testing.assert_allclose(partial, [1.0, full[1], 1.0])
