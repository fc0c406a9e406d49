"""Renewal contact process laboratory: Python surface of the C++ core."""

from ._rcp import (  # noqa: F401
    BadEventRateTable,
    BatchSummary,
    BinomialEstimate,
    ConditionParams,
    ConditionReport,
    CouplingTailTable,
    FarGapTable,
    IntervalKind,
    LambdaScan,
    LambdaUpperResult,
    Law,
    QuietInterval,
    SimConfig,
    SimOutcome,
    SurvivalCurve,
    check_conditions,
    choose_coupling_interval,
    conditioned_origin_batch,
    estimate_bad_event_rates,
    estimate_count_tail,
    estimate_coupling_tails,
    estimate_far_gap,
    estimate_gap_probability,
    estimate_lambda_c_upper,
    find_quiet_subinterval,
    lambda_scan,
    run_batch,
    run_replica,
    survival_curve,
)

__all__ = [name for name in dir() if not name.startswith("_")]
