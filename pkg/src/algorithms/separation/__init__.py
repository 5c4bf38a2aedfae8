from .separation import (
    HG_DISPERSION,
    RUNNERS,
    g_ama_sweep,
    g_mma_sweep,
    hg_ama_sweep,
    hg_mma_sweep,
    run_g_ama,
    run_g_mma,
    run_hg_ama,
    run_hg_mma,
    separate,
    upper_pairs,
)
