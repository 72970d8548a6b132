"""Sparse adaptive filtering: OLBI and LMS-family algorithms.

The package bundles the five online algorithms (``filters``), the
scalar nonlinearities they share (``proximal``), closed-form
convergence and MSD predictions for white input (``theory``),
reproducible scenario/stream generation (``synth``), a Monte Carlo
experiment engine (``harness``) and a benchmark CLI (``cli``).
"""

from .filters import (
    ALGORITHMS,
    AdaptiveFilter,
    AlgoParams,
    FilterDivergedError,
    StepOutcome,
    make_filter,
)
from .harness import (
    AllTrialsDivergedError,
    MsdTrajectory,
    RunSpec,
    SteadyStateEstimate,
    SweepResult,
    TrialResult,
    run_experiment,
    run_trial,
    steady_state_msd,
    sweep,
)
from .proximal import l0_attractor, rza_attractor, shrink, za_attractor
from .synth import InputMode, SampleStream, Scenario, make_scenario, stream
from .theory import (
    PiecewiseMsdCurve,
    SystemStats,
    instantaneous_msd_curve,
    iterate_msd_recursion,
    lms_mean_stability_bound,
    lms_ms_stability_bound,
    lms_steady_state_msd,
    msd_ratio_small_delta,
    noise_power_for_snr,
    olbi_ms_stability_bound,
    olbi_steady_state_msd,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "AdaptiveFilter",
    "AlgoParams",
    "AllTrialsDivergedError",
    "FilterDivergedError",
    "InputMode",
    "MsdTrajectory",
    "PiecewiseMsdCurve",
    "RunSpec",
    "SampleStream",
    "Scenario",
    "SteadyStateEstimate",
    "StepOutcome",
    "SweepResult",
    "SystemStats",
    "TrialResult",
    "instantaneous_msd_curve",
    "iterate_msd_recursion",
    "l0_attractor",
    "lms_mean_stability_bound",
    "lms_ms_stability_bound",
    "lms_steady_state_msd",
    "make_filter",
    "make_scenario",
    "msd_ratio_small_delta",
    "noise_power_for_snr",
    "olbi_ms_stability_bound",
    "olbi_steady_state_msd",
    "run_experiment",
    "run_trial",
    "rza_attractor",
    "shrink",
    "steady_state_msd",
    "stream",
    "sweep",
    "za_attractor",
]
