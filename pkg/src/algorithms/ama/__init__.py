from .ama import (
    THETA_BOUND,
    ama_cost,
    as_polynomial,
    build_ama_polynomial_givens,
    build_ama_polynomial_hyperbolic,
    solve_ama_givens,
    solve_ama_hyperbolic,
)
