"""Minimum-variance estimation for finite-state Markov chains via duality.

The heavy lifting lives in the compiled ``dualest._core`` module: exact chain
simulation, the Wonham filter and its discrete Bayes reference, the backward
dual solver with its adapted decomposition, Monte Carlo cost experiments, and
the linear-Gaussian (Kalman-Bucy) benchmark.
"""

from dualest._core import (
    FilterBlowupError,
    JumpPath,
    __version__,
    bayes_oracle,
    conditional_covariance,
    cost_monte_carlo,
    deterministic_cost,
    dual_lq_solve,
    duality_check,
    filter_gap_study,
    kalman_bucy,
    linear_estimator_mse,
    martingale_part,
    optimal_gain,
    q_of_state,
    quadratic_variation,
    run_wonham,
    simulate_ctmc,
    simulate_observation,
    solve_backward,
    state_vector,
    stationary_distribution,
)

__all__ = [
    "FilterBlowupError",
    "JumpPath",
    "__version__",
    "bayes_oracle",
    "conditional_covariance",
    "cost_monte_carlo",
    "deterministic_cost",
    "dual_lq_solve",
    "duality_check",
    "filter_gap_study",
    "kalman_bucy",
    "linear_estimator_mse",
    "martingale_part",
    "optimal_gain",
    "q_of_state",
    "quadratic_variation",
    "run_wonham",
    "simulate_ctmc",
    "simulate_observation",
    "solve_backward",
    "state_vector",
    "stationary_distribution",
]
