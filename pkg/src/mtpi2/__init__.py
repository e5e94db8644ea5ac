"""Interval-based Bayesian phase-I dose finding: the mTPI and mTPI-2 designs.

Exact beta-binomial posterior math, optimal escalation decisions with
safety exclusion, precalculated decision tables with Bayes factors, live
trial conduct with isotonic MTD selection, and Monte Carlo evaluation of
operating characteristics.
"""

from .conduct import (
    MtdResult,
    TrialError,
    TrialState,
    check_stop,
    new_trial,
    next_dose,
    pava,
    record_cohort,
    select_mtd,
    step,
)
from .engine import (
    DecisionCell,
    DecisionTable,
    DiffEntry,
    apply_safety_rule,
    bayes_factor,
    decide,
    decide_mtpi,
    decide_mtpi2,
    decision_table,
    posterior_expected_loss,
    posterior_model_probs,
    table_diff,
    upm,
)
from .partition import (
    DesignParams,
    Interval,
    IntervalPartition,
    build_partition,
    loss_matrix,
    mtpi2_partition,
    mtpi_partition,
)
from .posterior import (
    BetaParams,
    DoseData,
    interval_mass,
    posterior,
    posterior_mean,
    posterior_variance,
    prob_over_target,
    reg_inc_beta,
)
from .simulate import (
    Comparison,
    OCReport,
    Scenario,
    SimConfig,
    compare_designs,
    default_suite,
    load_scenarios,
    run_study,
    simulate_trial,
    true_mtd,
)

__version__ = "0.1.0"

__all__ = [
    "BetaParams",
    "Comparison",
    "DecisionCell",
    "DecisionTable",
    "DesignParams",
    "DiffEntry",
    "DoseData",
    "Interval",
    "IntervalPartition",
    "MtdResult",
    "OCReport",
    "Scenario",
    "SimConfig",
    "TrialError",
    "TrialState",
    "apply_safety_rule",
    "bayes_factor",
    "build_partition",
    "check_stop",
    "compare_designs",
    "decide",
    "decide_mtpi",
    "decide_mtpi2",
    "decision_table",
    "default_suite",
    "interval_mass",
    "load_scenarios",
    "loss_matrix",
    "mtpi2_partition",
    "mtpi_partition",
    "new_trial",
    "next_dose",
    "pava",
    "posterior",
    "posterior_expected_loss",
    "posterior_mean",
    "posterior_model_probs",
    "posterior_variance",
    "prob_over_target",
    "record_cohort",
    "reg_inc_beta",
    "run_study",
    "select_mtd",
    "simulate_trial",
    "step",
    "table_diff",
    "true_mtd",
    "upm",
]
