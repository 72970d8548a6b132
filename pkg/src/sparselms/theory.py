"""Closed-form convergence and mean-square-deviation predictions.

Everything here assumes white, zero-mean, i.i.d. input with per-component
power ``sigma_x2`` and observation noise of power ``sigma_e2``, the
regime in which the OLBI analysis is exact enough to be useful:

* mean convergence of the weights holds for ``delta < 1/lambda_max``;
* the mean-square deviation (MSD) ``D_k = E||w_k - w_star||^2`` obeys an
  affine recursion whose fixed point gives the steady-state MSD;
* during the transient, OLBI weights activate one by one as their
  accumulator crosses the threshold, so the MSD follows a piecewise
  geometric curve with one segment per activation.

The steady-state formulas for OLBI depend on the true support size
``k0 = ||w_star||_0`` where plain LMS depends on the filter length
``n``; their small-step ratio is ``k0 / n``.

All functions are pure; invalid or out-of-stability arguments raise
``ValueError`` rather than returning NaN, so sweeps can tell "theory
undefined" from "theory small".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SystemStats",
    "PiecewiseMsdCurve",
    "lms_mean_stability_bound",
    "olbi_ms_stability_bound",
    "lms_ms_stability_bound",
    "olbi_steady_state_msd",
    "lms_steady_state_msd",
    "msd_ratio_small_delta",
    "iterate_msd_recursion",
    "instantaneous_msd_curve",
    "noise_power_for_snr",
]


@dataclass(frozen=True)
class SystemStats:
    """Second-order description of the identification problem.

    ``n`` filter length, ``k0`` number of nonzero true weights,
    ``sigma_x2`` input power per component, ``sigma_e2`` noise power.
    """

    n: int
    k0: int
    sigma_x2: float
    sigma_e2: float

    def __post_init__(self):
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise ValueError(f"n must be a positive integer (got {self.n})")
        if not (isinstance(self.k0, (int, np.integer)) and 0 <= self.k0 <= self.n):
            raise ValueError(f"k0 must be an integer in [0, n] (got {self.k0})")
        if not (self.sigma_x2 > 0.0):
            raise ValueError(f"sigma_x2 must be > 0 (got {self.sigma_x2})")
        if not (self.sigma_e2 >= 0.0):
            raise ValueError(f"sigma_e2 must be >= 0 (got {self.sigma_e2})")


@dataclass(frozen=True)
class PiecewiseMsdCurve:
    """Predicted OLBI MSD trajectory.

    ``crossing_times[i]`` is the (real-valued) step at which the
    (i+1)-th largest true weight's accumulator reaches the threshold;
    ``segment_gains[i]`` / ``segment_offsets[i]`` are the per-step
    affine coefficients while exactly ``i`` weights are active;
    ``values[t]`` is the predicted MSD at integer step ``t``.
    """

    crossing_times: np.ndarray
    segment_gains: np.ndarray
    segment_offsets: np.ndarray
    values: np.ndarray


def lms_mean_stability_bound(lambda_max: float) -> float:
    """Exclusive upper bound ``1 / lambda_max`` on ``delta`` for mean convergence.

    ``lambda_max`` is the largest eigenvalue of the input covariance;
    for white input of power ``sigma_x2`` it equals ``sigma_x2``.
    """
    if not (lambda_max > 0.0):
        raise ValueError(f"lambda_max must be > 0 (got {lambda_max})")
    return 1.0 / lambda_max


def olbi_ms_stability_bound(stats: SystemStats) -> float:
    """Exclusive upper bound ``2 / ((k0 + 2) * sigma_x2)`` for OLBI mean-square convergence."""
    return 2.0 / ((stats.k0 + 2) * stats.sigma_x2)


def lms_ms_stability_bound(stats: SystemStats) -> float:
    """Exclusive upper bound ``2 / ((n + 2) * sigma_x2)`` for LMS mean-square convergence."""
    return 2.0 / ((stats.n + 2) * stats.sigma_x2)


def olbi_steady_state_msd(delta: float, stats: SystemStats) -> float:
    """Steady-state MSD of OLBI: ``delta*sigma_e2*k0 / (2 - delta*sigma_x2*(k0+2))``.

    Valid for ``0 < delta < olbi_ms_stability_bound(stats)``; outside
    that range the recursion has no finite fixed point and a
    ``ValueError`` is raised.
    """
    bound = olbi_ms_stability_bound(stats)
    if not (0.0 < delta < bound):
        raise ValueError(
            f"delta={delta} outside the mean-square stability range (0, {bound})"
        )
    return (
        delta * stats.sigma_e2 * stats.k0
        / (2.0 - delta * stats.sigma_x2 * (stats.k0 + 2))
    )


def lms_steady_state_msd(delta: float, stats: SystemStats) -> float:
    """Steady-state MSD of plain LMS: ``delta*sigma_e2*n / (2 - delta*sigma_x2*(n+2))``.

    Same form as the OLBI result with the support size replaced by the
    full filter length.  Valid for ``0 < delta < lms_ms_stability_bound``.
    """
    bound = lms_ms_stability_bound(stats)
    if not (0.0 < delta < bound):
        raise ValueError(
            f"delta={delta} outside the mean-square stability range (0, {bound})"
        )
    return (
        delta * stats.sigma_e2 * stats.n
        / (2.0 - delta * stats.sigma_x2 * (stats.n + 2))
    )


def msd_ratio_small_delta(stats: SystemStats) -> float:
    """Small-learning-rate limit of steady-state MSD(OLBI)/MSD(LMS): ``k0 / n``."""
    return stats.k0 / stats.n


def iterate_msd_recursion(
    delta: float,
    stats: SystemStats,
    k0_active: int,
    d0: float,
    steps: int,
) -> np.ndarray:
    """Iterate the one-step MSD recursion and return ``D_0 .. D_steps``.

    With ``k0_active`` weights active the MSD evolves as::

        D_{k+1} = (1 - 2*d*sx2 + (k0_active+2)*d**2*sx2**2) * D_k
                  + d**2*sx2*se2*k0_active

    This is the independent numerical route to the closed-form steady
    state: inside the stability range the sequence converges to
    ``olbi_steady_state_msd`` (or the LMS value for ``k0_active = n``).
    Divergent sequences are returned as-is for boundary studies.
    """
    if not (isinstance(steps, (int, np.integer)) and steps >= 1):
        raise ValueError(f"steps must be a positive integer (got {steps})")
    if k0_active < 0:
        raise ValueError(f"k0_active must be >= 0 (got {k0_active})")
    u = delta * stats.sigma_x2
    gain = 1.0 - 2.0 * u + (k0_active + 2) * u * u
    offset = delta * delta * stats.sigma_x2 * stats.sigma_e2 * k0_active
    out = np.empty(steps + 1)
    out[0] = d = float(d0)
    for k in range(1, steps + 1):
        d = gain * d + offset
        out[k] = d
    return out


def instantaneous_msd_curve(
    w_star: np.ndarray,
    delta: float,
    gamma: float,
    stats: SystemStats,
    horizon: int,
) -> PiecewiseMsdCurve:
    """Piecewise-geometric prediction of the OLBI MSD transient.

    Starting from zero weights the deviation is ``||w_star||^2``.  The
    accumulator behind the i-th largest true weight (magnitude ``v_i``)
    drifts at rate ``delta * v_i * sigma_x2`` per step, so it reaches
    the threshold near ``t_i = gamma / (delta * v_i * sigma_x2)``.
    Between consecutive activations the MSD follows an affine
    recursion; its per-segment closed form is chained continuously
    across the activation steps (a component counts as active from
    integer step ``ceil(t_i)``; ties activate together).  The curve
    approaches the closed-form steady state as ``t`` grows.

    Requires ``gamma > 0`` (with no thresholding the LMS recursion
    applies instead, via :func:`iterate_msd_recursion`) and a ``delta``
    inside the OLBI stability range.
    """
    w_star = np.asarray(w_star, dtype=float)
    if w_star.ndim != 1 or w_star.size != stats.n:
        raise ValueError(
            f"w_star must be a length-{stats.n} vector (got shape {w_star.shape})"
        )
    if not (gamma > 0.0):
        raise ValueError("gamma must be > 0; for gamma=0 use the LMS recursion")
    bound = olbi_ms_stability_bound(stats)
    if not (0.0 < delta < bound):
        raise ValueError(
            f"delta={delta} outside the mean-square stability range (0, {bound})"
        )
    if not (isinstance(horizon, (int, np.integer)) and horizon >= 1):
        raise ValueError(f"horizon must be a positive integer (got {horizon})")

    mags = np.sort(np.abs(w_star[w_star != 0.0]))[::-1]
    k0 = mags.size
    if k0 != stats.k0:
        raise ValueError(
            f"w_star has {k0} nonzero components but stats.k0 = {stats.k0}"
        )

    crossing_times = gamma / (delta * mags * stats.sigma_x2)  # ascending

    u = delta * stats.sigma_x2
    active = np.arange(k0 + 1)
    gains = 1.0 - 2.0 * u + (active + 2) * u * u
    tail_sq = np.zeros(k0 + 1)
    if k0:
        tail_sq[:k0] = np.cumsum((mags * mags)[::-1])[::-1]
    offsets = (
        2.0 * u * (1.0 - u) * tail_sq
        + active * delta * delta * stats.sigma_x2 * stats.sigma_e2
    )

    values = np.empty(horizon + 1)
    values[0] = float(np.dot(w_star, w_star))
    # Activation steps bound the segments; everything clips to the horizon.
    starts = np.minimum(np.ceil(crossing_times), float(horizon)).astype(np.int64)
    bounds = np.concatenate(([0], starts, [horizon]))
    for i in range(k0 + 1):
        lo, hi = int(bounds[i]), int(bounds[i + 1])
        if hi <= lo:
            continue
        k = np.arange(1, hi - lo + 1, dtype=float)
        decay = gains[i] ** k
        values[lo + 1 : hi + 1] = decay * values[lo] + offsets[i] * (
            (1.0 - decay) / (1.0 - gains[i])
        )
    return PiecewiseMsdCurve(crossing_times, gains, offsets, values)


def noise_power_for_snr(
    w_star: np.ndarray, sigma_x2: float, snr_db: float
) -> float:
    """Noise power that realizes ``snr_db`` for the system ``w_star``.

    SNR is taken as noiseless output power over noise power.  For white
    zero-mean input the output power is ``||w_star||^2 * sigma_x2``, so

        ``sigma_e2 = ||w_star||^2 * sigma_x2 / 10**(snr_db / 10)``.
    """
    if not (sigma_x2 > 0.0):
        raise ValueError(f"sigma_x2 must be > 0 (got {sigma_x2})")
    w_star = np.asarray(w_star, dtype=float)
    signal_power = float(np.dot(w_star, w_star)) * sigma_x2
    if signal_power == 0.0:
        raise ValueError("SNR is undefined for an all-zero system")
    return signal_power / 10.0 ** (snr_db / 10.0)
