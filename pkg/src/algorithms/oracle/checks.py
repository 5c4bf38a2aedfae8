import copy
import logging
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from common.prewhiten import apply_whitener, fit_whitener
from common.rotations import apply_pair, stack
from common.signal_model import build_constellation, draw_channel, draw_sources, transmit
from common.typings import (
    ConstellationSpec,
    Criterion,
    PairFamily,
    RealStackedBlock,
    RotationKind,
    RowPair,
    SolverMode,
    StructuredSeparator,
)
from algorithms.ama import ama_cost, solve_ama_givens, solve_ama_hyperbolic
from algorithms.mma import (
    accumulate_givens_form,
    accumulate_hyperbolic_system,
    mm_cost,
    solve_givens_theta,
    solve_hyperbolic_exact,
)
from algorithms.separation import g_mma_sweep

from .oracle import grid_min_givens, grid_min_hyperbolic

logger = logging.getLogger(__name__)

CHECK_TOLERANCE = 1e-6   # excess cost allowed, relative to max(1, oracle cost)
WARMSTART_SWEEPS = 5

Solver = Callable[[RealStackedBlock, RowPair, ConstellationSpec], Tuple[float, float]]


@dataclass
class OracleCheck:
    name: str
    worst_excess: float   # solver cost minus grid cost, relative
    tolerance: float
    n_cases: int

    @property
    def passed(self) -> bool:
        return self.worst_excess <= self.tolerance


def whitened_block(
    spec: ConstellationSpec,
    n_streams: int,
    n_samples: int,
    seed: int,
    snr_db: float = 30.0
) -> RealStackedBlock:
    """Seeded stacked block of whitened mixtures of n_streams sources."""
    channel_seed, source_seed, noise_seed = np.random.SeedSequence(seed).generate_state(3)
    channel = draw_channel(n_streams + 2, n_streams, 100.0, int(channel_seed))
    sources = draw_sources(spec, n_streams, n_samples, int(source_seed))
    received = transmit(channel, sources, snr_db, int(noise_seed))
    return stack(apply_whitener(fit_whitener(received, n_streams), received))


def warm_started_block(spec: ConstellationSpec, n_streams: int, n_samples: int,
                       seed: int) -> RealStackedBlock:
    data = whitened_block(spec, n_streams, n_samples, seed)
    sep = StructuredSeparator.identity(n_streams)
    for _ in range(WARMSTART_SWEEPS):
        g_mma_sweep(data, sep)
        sep.enforce_structure()
    return data


def run_oracle_checks(
    n_blocks: int = 20,
    seed: int = 0,
    n_streams: int = 3,
    n_samples: int = 100,
    order: int = 16,
    grid_step: float = 1e-4
) -> List[OracleCheck]:
    """Compare every single-rotation solver with the grid oracle on seeded blocks.

    MM checks run on freshly whitened data, AM checks after a G-MMA warm
    start (the AM cost is only unimodal near the alphabet).
    """
    spec = build_constellation(order)
    families = (PairFamily.DIRECT, PairFamily.CROSS)

    def givens_mm(data, pair, _spec):
        return solve_givens_theta(accumulate_givens_form(data, pair))

    def hyperbolic_mm(data, pair, _spec):
        return solve_hyperbolic_exact(
            accumulate_hyperbolic_system(data, pair, _spec.dispersion))

    def givens_am(data, pair, _spec):
        return solve_ama_givens(data, pair, _spec.half_spacing, SolverMode.EXACT)

    def hyperbolic_am(data, pair, _spec):
        return solve_ama_hyperbolic(data, pair, _spec.half_spacing, SolverMode.EXACT)

    plan = [
        ("givens-mm", givens_mm, RotationKind.GIVENS, Criterion.MM,
         (PairFamily.DIAGONAL,) + families, False),
        ("hyperbolic-mm", hyperbolic_mm, RotationKind.HYPERBOLIC, Criterion.MM, families, False),
        ("givens-am", givens_am, RotationKind.GIVENS, Criterion.AM, families, True),
        ("hyperbolic-am", hyperbolic_am, RotationKind.HYPERBOLIC, Criterion.AM, families, True),
    ]

    checks = []
    for name, solver, kind, criterion, pair_families, warm in plan:
        worst, cases = -np.inf, 0
        for block in range(n_blocks):
            block_seed = seed * 1_000_003 + block
            if warm:
                data = warm_started_block(spec, n_streams, n_samples, block_seed)
            else:
                data = whitened_block(spec, n_streams, n_samples, block_seed)
            for family in pair_families:
                pair = RowPair(0, 0, family) if family is PairFamily.DIAGONAL else RowPair(0, 1, family)
                excess = _excess(data, pair, spec, solver, kind, criterion, grid_step)
                worst = max(worst, excess)
                cases += 1
        checks.append(OracleCheck(name, float(worst), CHECK_TOLERANCE, cases))
        logger.info("%s: worst relative excess %.3e over %d case(s)", name, worst, cases)
    return checks


def _excess(
    data: RealStackedBlock,
    pair: RowPair,
    spec: ConstellationSpec,
    solver: Solver,
    kind: RotationKind,
    criterion: Criterion,
    grid_step: float
) -> float:
    if criterion is Criterion.MM:
        target, cost = spec.dispersion, lambda block: mm_cost(block, spec.dispersion)
    else:
        target, cost = spec.half_spacing, lambda block: ama_cost(block, spec.half_spacing)

    if kind is RotationKind.GIVENS:
        _, oracle_cost = grid_min_givens(data, pair, criterion, target, grid_step)
    else:
        _, oracle_cost = grid_min_hyperbolic(data, pair, criterion, target, grid_step)

    rotated = copy.deepcopy(data)
    sep = StructuredSeparator.identity(data.n_streams)
    apply_pair(rotated, sep, pair, kind, *solver(data, pair, spec))
    return (cost(rotated) - oracle_cost) / max(1.0, abs(oracle_cost))
