"""Security games as Monte Carlo harnesses with pluggable split adversaries."""

from .encryption import (
    HAAR_LIMIT,
    IND_CPA_STRATEGIES,
    REPROGRAM_MODES,
    REPROGRAM_STRATEGIES,
    REPROGRAM_WIRINGS,
    STRENGTHENED_STRATEGIES,
    run_deterministic_attack,
    run_haar_statistic,
    run_ind_cpa,
    run_reprogram_game,
    run_strengthened_moe,
)
from .harness import GameOutcome, Register, SharedState, Split, TrialResult, map_trials, run_trials, trial_rng
from .moe import (
    COSET_STRATEGIES,
    DIRECT_PRODUCT_STRATEGIES,
    WIESNER_STRATEGIES,
    breidbart_closed_form,
    run_direct_product,
    run_moe_coset,
    run_moe_wiesner,
)
from .piracy import PIRACY_STRATEGIES, InputDistribution, run_cp_correctness, run_piracy_point

__all__ = [
    "COSET_STRATEGIES",
    "DIRECT_PRODUCT_STRATEGIES",
    "GameOutcome",
    "HAAR_LIMIT",
    "IND_CPA_STRATEGIES",
    "InputDistribution",
    "PIRACY_STRATEGIES",
    "REPROGRAM_MODES",
    "REPROGRAM_STRATEGIES",
    "REPROGRAM_WIRINGS",
    "Register",
    "STRENGTHENED_STRATEGIES",
    "SharedState",
    "Split",
    "TrialResult",
    "WIESNER_STRATEGIES",
    "breidbart_closed_form",
    "map_trials",
    "run_cp_correctness",
    "run_deterministic_attack",
    "run_direct_product",
    "run_haar_statistic",
    "run_ind_cpa",
    "run_moe_coset",
    "run_moe_wiesner",
    "run_piracy_point",
    "run_reprogram_game",
    "run_strengthened_moe",
    "run_trials",
    "trial_rng",
]
