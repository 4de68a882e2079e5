"""Predict-and-optimise energy scheduling toolkit."""

from ppo._core import (
    Calendar,
    DomainError,
    InputError,
    Instance,
    ParseError,
    apply_correction,
    bias_decomposition,
    check_feasibility,
    energy_cost,
    error_report,
    evaluate,
    fit_gamma_epsilon,
    linear_correction,
    mae,
    mase,
    objective,
    optimize,
    parse_instance,
    pearson,
    perturb,
    run_cli,
    u_cost,
    v_cost,
)

POLICIES = ("conservative", "forced-discharge", "no-forced-discharge", "liberal", "very-liberal")

__all__ = [name for name in dir() if not name.startswith("_")]
