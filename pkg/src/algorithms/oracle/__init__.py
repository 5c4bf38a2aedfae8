from .oracle import (
    DEFAULT_GRID_STEP,
    DEFAULT_HYPERBOLIC_BOUND,
    best_permutation,
    grid_min_givens,
    grid_min_hyperbolic,
    naive_ama_cost,
    naive_mm_cost,
    naive_sinr_db,
)
from .checks import OracleCheck, run_oracle_checks, warm_started_block, whitened_block
