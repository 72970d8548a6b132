"""Monte Carlo experiment engine.

A :class:`RunSpec` is the complete, seeded description of one
experiment: scenario parameters, algorithm, step/trial counts and
sampling controls.  Everything downstream is a pure function of it.
Per-trial randomness comes from seeds derived as ``[master_seed, 1 +
trial_index]`` (the scenario itself uses ``[master_seed, 0]``), so
trials are reproducible independently, in any order, and in parallel.

``run_experiment`` averages the squared misalignment ``||w_k -
w_star||^2`` across trials into an MSD trajectory; ``sweep`` repeats
that over a parameter grid and pairs each point with the closed-form
steady-state prediction where one exists.  Trials whose filter diverges
are excluded from averages but always counted.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats as _sstats

from . import theory
from .filters import AlgoParams, FilterDivergedError, make_filter
from .synth import InputMode, Scenario, make_scenario, stream

__all__ = [
    "RunSpec",
    "TrialResult",
    "MsdTrajectory",
    "SteadyStateEstimate",
    "SweepResult",
    "AllTrialsDivergedError",
    "build_scenario",
    "resolve_steps",
    "run_trial",
    "run_experiment",
    "steady_state_msd",
    "steady_state_theory",
    "tail_slope_test",
    "sweep",
]

SWEEPABLE = ("delta", "gamma", "k0", "snr_db")

_BLOCK = 512  # stream block length; invisible in results


class AllTrialsDivergedError(RuntimeError):
    """Every trial of an experiment diverged; no average exists."""


@dataclass(frozen=True)
class RunSpec:
    """Full description of one Monte Carlo experiment."""

    n: int
    k0: int
    algo: AlgoParams
    sigma_x2: float = 1.0
    snr_db: float | None = None
    sigma_e2: float | None = None
    input_mode: InputMode = InputMode.IID_VECTOR
    steps: int | None = None  # None: auto, 5x the predicted transient
    trials: int = 100
    sample_every: int = 10
    steady_window: int | None = None  # None: last 10% of sampled points
    master_seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1 (got {self.trials})")
        if self.sample_every < 1:
            raise ValueError(f"sample_every must be >= 1 (got {self.sample_every})")
        if self.steps is not None and self.steps < 1:
            raise ValueError(f"steps must be >= 1 (got {self.steps})")
        if self.steady_window is not None and self.steady_window < 1:
            raise ValueError(
                f"steady_window must be >= 1 (got {self.steady_window})"
            )


@dataclass(frozen=True)
class TrialResult:
    """Subsampled squared misalignment of one trial."""

    msd: np.ndarray
    final_sparsity: int | None
    diverged: bool
    diverged_at: int | None


@dataclass(frozen=True)
class MsdTrajectory:
    """Trial-averaged MSD curve with bookkeeping."""

    steps_sampled: np.ndarray
    msd: np.ndarray
    msd_db: np.ndarray
    trials_used: int
    diverged_trials: int
    final_sparsity_mean: float


@dataclass(frozen=True)
class SteadyStateEstimate:
    """Tail-window mean of an MSD trajectory.

    ``transient_contaminated`` flags a window that starts before the
    predicted transient has died out; the value is still reported.
    """

    value: float
    window_points: int
    transient_contaminated: bool


@dataclass(frozen=True)
class SweepResult:
    """Steady-state MSD and sparsity across one swept parameter.

    Entries are ``None`` where a point has no value (all trials
    diverged, or no closed-form prediction applies).
    """

    swept_param: str
    param_values: list[float]
    steady_msd_sim: list[float | None]
    steady_msd_theory: list[float | None]
    sparsity_sim: list[float | None]
    diverged_trials: list[int]


def build_scenario(spec: RunSpec) -> Scenario:
    """Realize the ground-truth system for ``spec`` (seed ``[master_seed, 0]``)."""
    return make_scenario(
        n=spec.n,
        k0=spec.k0,
        sigma_x2=spec.sigma_x2,
        snr_db=spec.snr_db,
        sigma_e2=spec.sigma_e2,
        input_mode=spec.input_mode,
        seed=[spec.master_seed, 0],
    )


def _transient_steps(spec: RunSpec, scenario: Scenario) -> float:
    """Predicted end of the transient, in steps.

    For OLBI with a real threshold this is the last accumulator
    crossing time; otherwise a few LMS time constants ``1/(delta *
    sigma_x2)``.
    """
    algo = spec.algo
    if algo.variant == "olbi" and algo.gamma > 0.0 and scenario.k0 > 0:
        min_mag = float(np.min(np.abs(scenario.w_star[scenario.w_star != 0.0])))
        return algo.gamma / (algo.delta * min_mag * scenario.sigma_x2)
    return 3.0 / (algo.delta * scenario.sigma_x2)


def resolve_steps(spec: RunSpec, scenario: Scenario) -> int:
    """Explicit step count, or 5x the predicted transient (at least 1000)."""
    if spec.steps is not None:
        return spec.steps
    algo = spec.algo
    if algo.variant == "olbi" and algo.gamma > 0.0 and scenario.k0 > 0:
        auto = 5.0 * _transient_steps(spec, scenario)
    else:
        auto = 5.0 / (algo.delta * scenario.sigma_x2)
    return max(1000, math.ceil(auto))


def _sample_steps(steps: int, sample_every: int) -> np.ndarray:
    return np.arange(0, steps + 1, sample_every)


def run_trial(
    spec: RunSpec,
    trial_index: int,
    scenario: Scenario | None = None,
    steps: int | None = None,
) -> TrialResult:
    """Run one seeded trial and record ``||w_k - w_star||^2`` at the sampling stride.

    A diverging filter is caught and flagged, never propagated: the
    result carries the partial record and the step of failure.
    """
    if scenario is None:
        scenario = build_scenario(spec)
    if steps is None:
        steps = resolve_steps(spec, scenario)
    filt = make_filter(spec.algo, scenario.n)
    src = stream(scenario, [spec.master_seed, 1 + trial_index])
    w_star = scenario.w_star
    msd = np.empty(len(_sample_steps(steps, spec.sample_every)))
    msd[0] = filt.misalignment(w_star)
    idx = 1
    diff = np.empty(scenario.n)
    k = 0
    next_sample = spec.sample_every
    try:
        for x_block, f_block in src.blocks(steps, _BLOCK):
            lo, size = 0, f_block.shape[0]
            while lo < size:
                # advance to the next sampling point (or block end)
                take = min(next_sample - k, size - lo)
                filt.run_block(x_block[lo : lo + take], f_block[lo : lo + take])
                k += take
                lo += take
                if k == next_sample:
                    np.subtract(filt.w, w_star, out=diff)
                    msd[idx] = np.dot(diff, diff)
                    idx += 1
                    next_sample += spec.sample_every
    except FilterDivergedError as err:
        return TrialResult(msd[:idx], None, True, err.step)
    if spec.algo.variant == "olbi":
        tol = 0.0
    else:
        peak = float(np.max(np.abs(filt.w)))
        tol = 1e-8 * peak
    return TrialResult(msd, filt.sparsity(tol), False, None)


def _trial_task(args) -> TrialResult:
    spec, trial_index, steps = args
    return run_trial(spec, trial_index, steps=steps)


def run_experiment(spec: RunSpec, workers: int = 1) -> MsdTrajectory:
    """Average ``spec.trials`` independent trials into an MSD trajectory.

    ``workers`` > 1 runs trials on a process pool (0 means one per
    CPU); aggregation is by trial index, so the result is identical at
    any parallelism degree.  Raises :class:`AllTrialsDivergedError` if
    no trial survives.
    """
    scenario = build_scenario(spec)
    steps = resolve_steps(spec, scenario)
    if workers == 0:
        workers = os.cpu_count() or 1
    if workers > 1 and spec.trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    _trial_task,
                    [(spec, i, steps) for i in range(spec.trials)],
                    chunksize=max(1, spec.trials // (4 * workers)),
                )
            )
    else:
        results = [
            run_trial(spec, i, scenario, steps) for i in range(spec.trials)
        ]
    kept = [r for r in results if not r.diverged]
    if not kept:
        raise AllTrialsDivergedError(
            f"all {spec.trials} trials diverged (delta={spec.algo.delta})"
        )
    msd = np.mean([r.msd for r in kept], axis=0)
    with np.errstate(divide="ignore"):
        msd_db = 10.0 * np.log10(msd)
    return MsdTrajectory(
        steps_sampled=_sample_steps(steps, spec.sample_every),
        msd=msd,
        msd_db=msd_db,
        trials_used=len(kept),
        diverged_trials=len(results) - len(kept),
        final_sparsity_mean=float(np.mean([r.final_sparsity for r in kept])),
    )


def _resolved_window(spec: RunSpec, n_samples: int) -> int:
    window = spec.steady_window
    if window is None:
        window = max(1, n_samples // 10)
    if window > n_samples:
        raise ValueError(
            f"steady_window={window} exceeds the {n_samples} sampled points"
        )
    return window


def steady_state_msd(traj: MsdTrajectory, spec: RunSpec) -> SteadyStateEstimate:
    """Mean MSD over the tail window, flagged if the window starts pre-transient."""
    window = _resolved_window(spec, len(traj.msd))
    value = float(np.mean(traj.msd[-window:]))
    window_start = int(traj.steps_sampled[-window])
    contaminated = window_start < _transient_steps(spec, build_scenario(spec))
    return SteadyStateEstimate(value, window, contaminated)


def tail_slope_test(
    traj: MsdTrajectory, window: int | None = None
) -> tuple[float, float]:
    """Least-squares slope of the tail window and its two-sided p-value.

    A stable, converged run should be flat: p above the chosen level
    means the slope is statistically indistinguishable from zero.
    """
    if window is None:
        window = max(3, len(traj.msd) // 10)
    steps = traj.steps_sampled[-window:]
    fit = _sstats.linregress(steps, traj.msd[-window:])
    return float(fit.slope), float(fit.pvalue)


def steady_state_theory(spec: RunSpec, scenario: Scenario) -> float | None:
    """Closed-form steady-state MSD where one applies, else ``None``.

    OLBI with a positive threshold uses the sparse closed form; OLBI
    with ``gamma=0`` is plain LMS and uses the LMS form.  The
    zero-attraction variants have no closed form here.
    """
    algo = spec.algo
    stats = theory.SystemStats(
        n=scenario.n,
        k0=scenario.k0,
        sigma_x2=scenario.sigma_x2,
        sigma_e2=scenario.sigma_e2,
    )
    try:
        if algo.variant == "olbi" and algo.gamma > 0.0:
            return theory.olbi_steady_state_msd(algo.delta, stats)
        if algo.variant == "lms" or (algo.variant == "olbi" and algo.gamma == 0.0):
            return theory.lms_steady_state_msd(algo.delta, stats)
    except ValueError:
        return None  # outside the stability range
    return None


def _spec_with(spec: RunSpec, param: str, value: float) -> RunSpec:
    if param == "delta":
        return replace(spec, algo=replace(spec.algo, delta=float(value)))
    if param == "gamma":
        if spec.algo.variant != "olbi":
            raise ValueError("gamma can only be swept for the olbi algorithm")
        return replace(spec, algo=replace(spec.algo, gamma=float(value)))
    if param == "k0":
        k0 = int(value)
        if k0 != value:
            raise ValueError(f"k0 sweep values must be integers (got {value})")
        return replace(spec, k0=k0)
    if param == "snr_db":
        return replace(spec, snr_db=float(value), sigma_e2=None)
    raise ValueError(f"unknown sweep parameter {param!r}; expected one of {SWEEPABLE}")


def sweep(
    spec: RunSpec,
    param: str,
    values,
    workers: int = 1,
) -> SweepResult:
    """Run one experiment per value of ``param`` and collect steady states.

    Points where every trial diverges are recorded as ``None`` and the
    sweep continues.
    """
    sim: list[float | None] = []
    theo: list[float | None] = []
    sparsity: list[float | None] = []
    diverged: list[int] = []
    for value in values:
        point = _spec_with(spec, param, value)
        theo.append(steady_state_theory(point, build_scenario(point)))
        try:
            traj = run_experiment(point, workers=workers)
        except AllTrialsDivergedError:
            sim.append(None)
            sparsity.append(None)
            diverged.append(point.trials)
            continue
        sim.append(steady_state_msd(traj, point).value)
        sparsity.append(traj.final_sparsity_mean)
        diverged.append(traj.diverged_trials)
    return SweepResult(
        swept_param=param,
        param_values=[float(v) for v in values],
        steady_msd_sim=sim,
        steady_msd_theory=theo,
        sparsity_sim=sparsity,
        diverged_trials=diverged,
    )
