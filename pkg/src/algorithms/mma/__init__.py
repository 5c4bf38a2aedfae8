from .mma import (
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
