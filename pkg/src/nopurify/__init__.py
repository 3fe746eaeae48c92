"""Two-copy purification of Werner states and noisy PR-boxes, checked by computation."""

from .boxworld import (
    anti_pr_box,
    box_twirl,
    chsh_value,
    is_nonsignalling,
    lhv_membership,
    noisy_pr,
    pr_box,
    pr_weight,
)
from .nogo import ConditionReport, QFunction, QuadCoeffs, check_conditions, q_of_p, theorem_scan
from .werner import (
    bbpssw_step,
    ppt_min_eigenvalue,
    singlet_fidelity,
    three_copy_formula,
    three_copy_protocol,
    twirl_quantum,
    werner_state,
    werner_threshold_bisect,
)
from .wirings import (
    effective_box,
    extract_quad_coeffs,
    figure2_wiring,
    search_all_wirings,
)

__version__ = "0.1.0"
