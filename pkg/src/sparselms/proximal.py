"""Scalar nonlinearities shared by the sparse adaptive filters.

Two families live here:

* ``shrink`` -- the soft-thresholding (shrinkage) operator, the proximal
  map of ``gamma * ||.||_1``.  It is the second half of every OLBI step.
* the zero-point attractors ``za_attractor``, ``rza_attractor`` and
  ``l0_attractor`` -- additive terms that pull filter weights toward
  zero in ZA-LMS, RZA-LMS and l0-LMS.

All functions accept scalars or numpy arrays and act componentwise.
They are pure and thread-safe.
"""

from __future__ import annotations

import numpy as np

__all__ = ["shrink", "za_attractor", "rza_attractor", "l0_attractor"]


def _check_finite(a, name: str) -> None:
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name}: non-finite input")


def shrink(a, gamma: float, out: np.ndarray | None = None):
    """Soft-threshold ``a`` toward zero by ``gamma``.

    Componentwise::

        shrink(a, gamma) = a - gamma   if a >  gamma
                           0           if -gamma <= a <= gamma
                           a + gamma   if a < -gamma

    Dead-zone inputs map to exact zeros.  ``shrink(a, 0) == a``.

    Parameters
    ----------
    a : float or ndarray
        Input value(s); must be finite.
    gamma : float
        Threshold, ``gamma >= 0``.
    out : ndarray, optional
        Preallocated result array (hot-loop use).

    Raises
    ------
    ValueError
        If ``gamma < 0`` or any input is non-finite.  Non-finite state
        is never clamped; callers treat the error as a failed trial.
    """
    if not (gamma >= 0.0):
        raise ValueError(f"gamma must be >= 0 (got {gamma})")
    _check_finite(a, "shrink")
    # a - clip(a, -gamma, gamma) is the piecewise map above, exactly:
    # the dead zone subtracts a from itself, yielding true zeros.
    clipped = np.clip(a, -gamma, gamma)
    return np.subtract(a, clipped, out=out)


def za_attractor(z):
    """Uniform zero-point attraction ``-sgn(z)``, with ``sgn(0) = 0``."""
    _check_finite(z, "za_attractor")
    return np.negative(np.sign(z))


def rza_attractor(z, eps: float):
    """Reweighted attraction ``-sgn(z) / (1 + eps * |z|)``.

    Attraction weakens as ``|z|`` grows, so large weights are left
    nearly untouched.  ``eps`` controls the falloff and must be > 0.
    """
    if not (eps > 0.0):
        raise ValueError(f"eps must be > 0 (got {eps})")
    _check_finite(z, "rza_attractor")
    return -np.sign(z) / (1.0 + eps * np.abs(z))


def l0_attractor(z, alpha: float):
    """Attraction ``alpha**2 * z - alpha * sgn(z)`` inside ``|z| < 1/alpha``, else 0.

    Shrinks only small coefficients; outside the interval (boundary
    included) the output is exactly zero, and the map is continuous at
    ``|z| = 1/alpha``.  ``alpha`` must be > 0.
    """
    if not (alpha > 0.0):
        raise ValueError(f"alpha must be > 0 (got {alpha})")
    _check_finite(z, "l0_attractor")
    inner = alpha * alpha * np.asarray(z) - alpha * np.sign(z)
    result = np.where(np.abs(z) < 1.0 / alpha, inner, 0.0)
    if np.ndim(z) == 0:
        return float(result)
    return result
