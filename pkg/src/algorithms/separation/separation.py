import logging
import time
from typing import Callable, Dict, Iterator, Optional, Tuple

from common.prewhiten import apply_whitener, fit_whitener
from common.rotations import apply_normalization, apply_pair, stack, unstack
from common.typings import (
    Algorithm,
    AlgorithmConfig,
    ConstellationSpec,
    PairFamily,
    RealStackedBlock,
    RotationHook,
    RotationKind,
    RowPair,
    SampleBlock,
    SeparationReport,
    SolverMode,
    StructuredSeparator,
    SweepHook,
    Whitener,
)
from algorithms.ama import ama_cost, solve_ama_givens, solve_ama_hyperbolic
from algorithms.mma import (
    accumulate_givens_form,
    accumulate_hyperbolic_system,
    compute_normalization,
    mm_cost,
    solve_givens_theta,
    solve_hyperbolic_approx,
    solve_hyperbolic_exact,
)

logger = logging.getLogger(__name__)

# HG variants drive every stream towards unit dispersion and rely on normalization
HG_DISPERSION = 1.0

SweepFunc = Callable[[RealStackedBlock, StructuredSeparator, Optional[RotationHook]], None]
CostFunc = Callable[[RealStackedBlock], float]


def upper_pairs(n_streams: int) -> Iterator[Tuple[int, int]]:
    for p in range(n_streams - 1):
        for q in range(p + 1, n_streams):
            yield p, q


def _step(
    data: RealStackedBlock,
    sep: StructuredSeparator,
    pair: RowPair,
    kind: RotationKind,
    params: Tuple[float, float],
    hook: Optional[RotationHook]
) -> None:
    rotation = apply_pair(data, sep, pair, kind, *params)
    if hook is not None:
        hook(rotation, data)


def _givens_mm_step(data, sep, pair, hook) -> None:
    _step(data, sep, pair, RotationKind.GIVENS,
          solve_givens_theta(accumulate_givens_form(data, pair)), hook)


def g_mma_sweep(
    data: RealStackedBlock,
    sep: StructuredSeparator,
    hook: Optional[RotationHook] = None
) -> None:
    """One G-MMA sweep: p <= q, the diagonal rotation when p == q, both families otherwise."""
    n = data.n_streams
    for p in range(n):
        _givens_mm_step(data, sep, RowPair(p, p, PairFamily.DIAGONAL), hook)
        for q in range(p + 1, n):
            for family in (PairFamily.DIRECT, PairFamily.CROSS):
                _givens_mm_step(data, sep, RowPair(p, q, family), hook)


def hg_mma_sweep(
    data: RealStackedBlock,
    sep: StructuredSeparator,
    mode: SolverMode,
    hook: Optional[RotationHook] = None
) -> None:
    """One HG-MMA sweep of normalized hyperbolic + Givens steps per family.

    Hyperbolic steps are solved against unit dispersion: every stream is
    normalized before the first of them, the two streams of a pair after each
    hyperbolic + Givens step, and all streams again at the end.
    """
    solve_hyperbolic = solve_hyperbolic_exact if mode is SolverMode.EXACT else solve_hyperbolic_approx
    n = data.n_streams
    apply_normalization(data, sep, compute_normalization(data))
    for p in range(n):
        _givens_mm_step(data, sep, RowPair(p, p, PairFamily.DIAGONAL), hook)
        for q in range(p + 1, n):
            for family in (PairFamily.DIRECT, PairFamily.CROSS):
                pair = RowPair(p, q, family)
                system = accumulate_hyperbolic_system(data, pair, HG_DISPERSION)
                _step(data, sep, pair, RotationKind.HYPERBOLIC, solve_hyperbolic(system), hook)
                _givens_mm_step(data, sep, pair, hook)
                apply_normalization(data, sep, compute_normalization(data, (p, q)))
    apply_normalization(data, sep, compute_normalization(data))


def g_ama_sweep(
    data: RealStackedBlock,
    sep: StructuredSeparator,
    d: float,
    mode: SolverMode,
    hook: Optional[RotationHook] = None
) -> None:
    """One AMA-phase Givens sweep over p < q (no diagonal rotation)."""
    for p, q in upper_pairs(data.n_streams):
        for family in (PairFamily.DIRECT, PairFamily.CROSS):
            pair = RowPair(p, q, family)
            _step(data, sep, pair, RotationKind.GIVENS, solve_ama_givens(data, pair, d, mode), hook)


def hg_ama_sweep(
    data: RealStackedBlock,
    sep: StructuredSeparator,
    d: float,
    mode: SolverMode,
    hook: Optional[RotationHook] = None
) -> None:
    """One AMA-phase sweep alternating hyperbolic and Givens rotations over p < q."""
    for p, q in upper_pairs(data.n_streams):
        for family in (PairFamily.DIRECT, PairFamily.CROSS):
            pair = RowPair(p, q, family)
            _step(data, sep, pair, RotationKind.HYPERBOLIC,
                  solve_ama_hyperbolic(data, pair, d, mode), hook)
            _step(data, sep, pair, RotationKind.GIVENS,
                  solve_ama_givens(data, pair, d, mode), hook)


def _run_schedule(
    data: RealStackedBlock,
    n_sweeps: int,
    n_warmstart: int,
    warm: Tuple[SweepFunc, CostFunc],
    main: Tuple[SweepFunc, CostFunc],
    whitener: Optional[Whitener],
    rotation_hook: Optional[RotationHook],
    sweep_hook: Optional[SweepHook]
) -> SeparationReport:
    """Sweeps 1..n_warmstart use the warm phase, the rest the main phase."""
    start = time.perf_counter()
    sep = StructuredSeparator.identity(data.n_streams)
    costs = []
    for sweep in range(1, n_sweeps + 1):
        sweep_func, cost_func = warm if sweep <= n_warmstart else main
        sweep_func(data, sep, rotation_hook)
        sep.enforce_structure()
        costs.append(cost_func(data))
        logger.debug("sweep %d/%d: cost %.6g", sweep, n_sweeps, costs[-1])
        if sweep_hook is not None:
            sweep_hook(sweep, sep)

    v = sep.complex_matrix()
    combined_w = v if whitener is None else v @ whitener.matrix_b
    return SeparationReport(
        separator=sep,
        v=v,
        combined_w=combined_w,
        separated=unstack(data),
        cost_per_sweep=costs,
        wall_time=time.perf_counter() - start,
    )


def _g_mma_phase(spec: ConstellationSpec) -> Tuple[SweepFunc, CostFunc]:
    return (lambda data, sep, hook: g_mma_sweep(data, sep, hook),
            lambda data: mm_cost(data, spec.dispersion))


def run_g_mma(
    data: RealStackedBlock,
    cfg: AlgorithmConfig,
    spec: ConstellationSpec,
    whitener: Optional[Whitener] = None,
    rotation_hook: Optional[RotationHook] = None,
    sweep_hook: Optional[SweepHook] = None
) -> SeparationReport:
    """G-MMA on pre-whitened stacked data; data is rotated in place."""
    phase = _g_mma_phase(spec)
    return _run_schedule(data, cfg.n_sweeps, 0, phase, phase,
                         whitener, rotation_hook, sweep_hook)


def run_hg_mma(
    data: RealStackedBlock,
    cfg: AlgorithmConfig,
    spec: ConstellationSpec,
    whitener: Optional[Whitener] = None,
    rotation_hook: Optional[RotationHook] = None,
    sweep_hook: Optional[SweepHook] = None
) -> SeparationReport:
    """HG-MMA with unit dispersion and one normalization per sweep."""
    phase = (lambda data, sep, hook: hg_mma_sweep(data, sep, cfg.solver_mode, hook),
             lambda data: mm_cost(data, HG_DISPERSION))
    return _run_schedule(data, cfg.n_sweeps, 0, phase, phase,
                         whitener, rotation_hook, sweep_hook)


def run_g_ama(
    data: RealStackedBlock,
    cfg: AlgorithmConfig,
    spec: ConstellationSpec,
    whitener: Optional[Whitener] = None,
    rotation_hook: Optional[RotationHook] = None,
    sweep_hook: Optional[SweepHook] = None
) -> SeparationReport:
    """n_warmstart G-MMA sweeps, then Givens AMA sweeps."""
    d = spec.half_spacing
    main = (lambda data, sep, hook: g_ama_sweep(data, sep, d, cfg.solver_mode, hook),
            lambda data: ama_cost(data, d))
    return _run_schedule(data, cfg.n_sweeps, cfg.n_warmstart, _g_mma_phase(spec), main,
                         whitener, rotation_hook, sweep_hook)


def run_hg_ama(
    data: RealStackedBlock,
    cfg: AlgorithmConfig,
    spec: ConstellationSpec,
    whitener: Optional[Whitener] = None,
    rotation_hook: Optional[RotationHook] = None,
    sweep_hook: Optional[SweepHook] = None
) -> SeparationReport:
    """n_warmstart G-MMA sweeps, then hyperbolic + Givens AMA sweeps."""
    d = spec.half_spacing
    main = (lambda data, sep, hook: hg_ama_sweep(data, sep, d, cfg.solver_mode, hook),
            lambda data: ama_cost(data, d))
    return _run_schedule(data, cfg.n_sweeps, cfg.n_warmstart, _g_mma_phase(spec), main,
                         whitener, rotation_hook, sweep_hook)


RUNNERS: Dict[Algorithm, Callable[..., SeparationReport]] = {
    Algorithm.G_MMA: run_g_mma,
    Algorithm.HG_MMA: run_hg_mma,
    Algorithm.G_AMA: run_g_ama,
    Algorithm.HG_AMA: run_hg_ama,
}


def separate(
    received: SampleBlock,
    n_sources: int,
    cfg: AlgorithmConfig,
    spec: ConstellationSpec,
    rotation_hook: Optional[RotationHook] = None,
    sweep_hook: Optional[SweepHook] = None
) -> Tuple[SeparationReport, Whitener]:
    """Whiten, stack, run the configured algorithm and return its report with the whitener.

    Args:
        received (SampleBlock): Y, N_r x N_s
        n_sources (int): N_t
        cfg (AlgorithmConfig): algorithm, sweep counts, solver and whitening modes
        spec (ConstellationSpec): source alphabet (dispersion and half spacing)
        rotation_hook (Optional[RotationHook]): called after every rotation pair
        sweep_hook (Optional[SweepHook]): called after every sweep

    Returns:
        Tuple[SeparationReport, Whitener]: report with W = V B, and B itself
    """
    whitener = fit_whitener(received, n_sources, cfg.whitening_mode)
    data = stack(apply_whitener(whitener, received))
    logger.debug("running %s on %dx%d block", cfg.label, received.rows, received.cols)
    report = RUNNERS[cfg.algorithm](data, cfg, spec, whitener, rotation_hook, sweep_hook)
    return report, whitener
