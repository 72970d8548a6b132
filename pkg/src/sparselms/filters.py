"""Online adaptive filters behind one uniform step interface.

Five algorithms share the same loop: observe an input vector ``x`` and
a desired output ``f``, emit the prediction ``w @ x``, then update the
weights from the prediction error ``e = f - w @ x``:

* ``lms``   -- plain stochastic gradient: ``w += delta * e * x``.
* ``olbi``  -- online linearized Bregman iteration.  The gradient
  accumulates in a second state vector ``m``; the weights are its
  soft-threshold, ``w = shrink(m, gamma)``.  Produces exactly sparse
  weights without biasing the steady state.
* ``za``    -- zero-attracting LMS: LMS plus ``delta * rho * (-sgn(w))``.
* ``rza``   -- reweighted ZA-LMS, attraction damped for large weights.
* ``l0``    -- l0-norm LMS, attraction active only on small weights.

Attractor terms are evaluated at the pre-update weights.  The update
order within a step is fixed (error, gradient term, attractor term),
and all variants run through the same compiled block kernels, so runs
are reproducible operation-for-operation; in particular ``olbi`` with
``gamma=0`` retraces ``lms`` bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numba import njit

__all__ = [
    "ALGORITHMS",
    "AlgoParams",
    "StepOutcome",
    "AdaptiveFilter",
    "FilterDivergedError",
    "make_filter",
]

ALGORITHMS = ("lms", "olbi", "za", "rza", "l0")

# params relevant to each algorithm, besides the always-present delta
_FIELDS_BY_VARIANT = {
    "lms": (),
    "olbi": ("gamma",),
    "za": ("rho",),
    "rza": ("rho", "eps"),
    "l0": ("kappa", "alpha"),
}


class FilterDivergedError(RuntimeError):
    """Weights became non-finite; carries the 1-based step index."""

    def __init__(self, step: int):
        super().__init__(f"filter diverged at step {step}")
        self.step = step


@dataclass(frozen=True)
class AlgoParams:
    """Hyperparameters for one algorithm variant.

    Only the fields relevant to ``variant`` may be set; passing any
    other raises at construction.  Use the per-algorithm constructors
    (``AlgoParams.olbi(...)`` etc.) rather than filling fields by hand.
    """

    variant: str
    delta: float
    gamma: float | None = None
    rho: float | None = None
    eps: float | None = None
    kappa: float | None = None
    alpha: float | None = None

    def __post_init__(self):
        if self.variant not in ALGORITHMS:
            raise ValueError(
                f"unknown algorithm {self.variant!r}; expected one of {ALGORITHMS}"
            )
        if not (self.delta > 0.0):
            raise ValueError(f"delta must be > 0 (got {self.delta})")
        relevant = _FIELDS_BY_VARIANT[self.variant]
        for name in ("gamma", "rho", "eps", "kappa", "alpha"):
            value = getattr(self, name)
            if name in relevant:
                if value is None:
                    raise ValueError(f"{name} is required for {self.variant}")
            elif value is not None:
                raise ValueError(f"{name} is not a parameter of {self.variant}")
        if self.gamma is not None and not (self.gamma >= 0.0):
            raise ValueError(f"gamma must be >= 0 (got {self.gamma})")
        if self.rho is not None and not (self.rho >= 0.0):
            raise ValueError(f"rho must be >= 0 (got {self.rho})")
        if self.eps is not None and not (self.eps > 0.0):
            raise ValueError(f"eps must be > 0 (got {self.eps})")
        if self.kappa is not None and not (self.kappa >= 0.0):
            raise ValueError(f"kappa must be >= 0 (got {self.kappa})")
        if self.alpha is not None and not (self.alpha > 0.0):
            raise ValueError(f"alpha must be > 0 (got {self.alpha})")

    @classmethod
    def lms(cls, delta: float) -> "AlgoParams":
        return cls("lms", delta)

    @classmethod
    def olbi(cls, delta: float, gamma: float) -> "AlgoParams":
        return cls("olbi", delta, gamma=gamma)

    @classmethod
    def za(cls, delta: float, rho: float) -> "AlgoParams":
        return cls("za", delta, rho=rho)

    @classmethod
    def rza(cls, delta: float, rho: float, eps: float) -> "AlgoParams":
        return cls("rza", delta, rho=rho, eps=eps)

    @classmethod
    def l0(cls, delta: float, kappa: float, alpha: float) -> "AlgoParams":
        return cls("l0", delta, kappa=kappa, alpha=alpha)


class StepOutcome(NamedTuple):
    """Prediction and error of one step, computed with pre-update weights."""

    prediction: float
    error: float


# Block kernels.  Each processes X[j], F[j] rows in order, writes the
# prediction and error per row, updates the state in place, and returns
# the 0-based row index at which a non-finite component appeared (-1 if
# none).  The gradient accumulation is written identically in every
# kernel so that algorithms sharing it round identically.


@njit(cache=True)
def _lms_kernel(w, X, F, delta, preds, errs):
    B, n = X.shape
    for j in range(B):
        pred = 0.0
        for i in range(n):
            pred += w[i] * X[j, i]
        e = F[j] - pred
        preds[j] = pred
        errs[j] = e
        de = delta * e
        bad = False
        for i in range(n):
            wi = w[i] + de * X[j, i]
            w[i] = wi
            if not math.isfinite(wi):
                bad = True
        if bad:
            return j
    return -1


@njit(cache=True)
def _olbi_kernel(w, m, X, F, delta, gamma, preds, errs):
    B, n = X.shape
    for j in range(B):
        pred = 0.0
        for i in range(n):
            pred += w[i] * X[j, i]
        e = F[j] - pred
        preds[j] = pred
        errs[j] = e
        de = delta * e
        bad = False
        for i in range(n):
            mi = m[i] + de * X[j, i]
            m[i] = mi
            if not math.isfinite(mi):
                bad = True
            c = mi  # w = m - clip(m, -gamma, gamma): exact zeros in the dead zone
            if c > gamma:
                c = gamma
            elif c < -gamma:
                c = -gamma
            w[i] = mi - c
        if bad:
            return j
    return -1


@njit(cache=True)
def _za_kernel(w, X, F, delta, dr, preds, errs):
    B, n = X.shape
    for j in range(B):
        pred = 0.0
        for i in range(n):
            pred += w[i] * X[j, i]
        e = F[j] - pred
        preds[j] = pred
        errs[j] = e
        de = delta * e
        bad = False
        for i in range(n):
            z = w[i]  # attractor uses the pre-update weight
            if z > 0.0:
                h = -1.0
            elif z < 0.0:
                h = 1.0
            else:
                h = 0.0
            wi = (z + de * X[j, i]) + dr * h
            w[i] = wi
            if not math.isfinite(wi):
                bad = True
        if bad:
            return j
    return -1


@njit(cache=True)
def _rza_kernel(w, X, F, delta, dr, eps, preds, errs):
    B, n = X.shape
    for j in range(B):
        pred = 0.0
        for i in range(n):
            pred += w[i] * X[j, i]
        e = F[j] - pred
        preds[j] = pred
        errs[j] = e
        de = delta * e
        bad = False
        for i in range(n):
            z = w[i]
            if z > 0.0:
                h = -1.0 / (1.0 + eps * z)
            elif z < 0.0:
                h = 1.0 / (1.0 + eps * (-z))
            else:
                h = 0.0
            wi = (z + de * X[j, i]) + dr * h
            w[i] = wi
            if not math.isfinite(wi):
                bad = True
        if bad:
            return j
    return -1


@njit(cache=True)
def _l0_kernel(w, X, F, delta, dk, alpha, preds, errs):
    B, n = X.shape
    edge = 1.0 / alpha
    for j in range(B):
        pred = 0.0
        for i in range(n):
            pred += w[i] * X[j, i]
        e = F[j] - pred
        preds[j] = pred
        errs[j] = e
        de = delta * e
        bad = False
        for i in range(n):
            z = w[i]
            if -edge < z < edge and z != 0.0:
                s = 1.0 if z > 0.0 else -1.0
                h = alpha * alpha * z - alpha * s
            else:
                h = 0.0
            wi = (z + de * X[j, i]) + dk * h
            w[i] = wi
            if not math.isfinite(wi):
                bad = True
        if bad:
            return j
    return -1


class AdaptiveFilter:
    """Mutable state of one adaptive filter run.

    Attributes
    ----------
    w : ndarray
        Current weights, length ``n``.  Read-only by convention.
    m : ndarray or None
        OLBI gradient accumulator (``None`` for other variants).
        Invariant after every step: ``w == shrink(m, gamma)``.
    step_count : int
        Number of completed steps.

    A filter instance is single-threaded; run one per worker.
    """

    def __init__(self, params: AlgoParams, n: int):
        if not (isinstance(n, (int, np.integer)) and n >= 1):
            raise ValueError(f"filter length n must be a positive integer (got {n})")
        self.params = params
        self.n = int(n)
        self.w = np.zeros(self.n)
        self.m = np.zeros(self.n) if params.variant == "olbi" else None
        self.step_count = 0
        self._x1 = np.empty((1, self.n))
        self._f1 = np.empty(1)
        self._p1 = np.empty(1)
        self._e1 = np.empty(1)

    def _dispatch(self, X, F, preds, errs) -> int:
        p = self.params
        if p.variant == "lms":
            return _lms_kernel(self.w, X, F, p.delta, preds, errs)
        if p.variant == "olbi":
            return _olbi_kernel(self.w, self.m, X, F, p.delta, p.gamma, preds, errs)
        if p.variant == "za":
            return _za_kernel(self.w, X, F, p.delta, p.delta * p.rho, preds, errs)
        if p.variant == "rza":
            return _rza_kernel(
                self.w, X, F, p.delta, p.delta * p.rho, p.eps, preds, errs
            )
        return _l0_kernel(
            self.w, X, F, p.delta, p.delta * p.kappa, p.alpha, preds, errs
        )

    def run_block(
        self, X: np.ndarray, F: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """Run one step per row of ``X`` against targets ``F``.

        Returns the per-step predictions and errors.  On a non-finite
        update the filter raises :class:`FilterDivergedError` with the
        global index of the offending step; the state is then unusable.
        """
        X = np.ascontiguousarray(X, dtype=np.float64)
        F = np.ascontiguousarray(F, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n:
            raise ValueError(f"block has shape {X.shape}, expected (steps, {self.n})")
        if F.shape != (X.shape[0],):
            raise ValueError(
                f"targets have shape {F.shape}, expected ({X.shape[0]},)"
            )
        preds = np.empty(X.shape[0])
        errs = np.empty(X.shape[0])
        bad = self._dispatch(X, F, preds, errs)
        if bad >= 0:
            self.step_count += bad + 1
            raise FilterDivergedError(self.step_count)
        self.step_count += X.shape[0]
        return preds, errs

    def step(self, x: np.ndarray, f: float) -> StepOutcome:
        """Predict against ``x``, observe ``f``, update the weights.

        Returns the prediction ``w @ x`` and error ``f - w @ x`` from
        before the update.  Raises :class:`FilterDivergedError` if the
        update produces a non-finite component.
        """
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise ValueError(f"input has shape {x.shape}, expected ({self.n},)")
        self._x1[0, :] = x
        self._f1[0] = f
        bad = self._dispatch(self._x1, self._f1, self._p1, self._e1)
        if bad >= 0:
            self.step_count += 1
            raise FilterDivergedError(self.step_count)
        self.step_count += 1
        return StepOutcome(float(self._p1[0]), float(self._e1[0]))

    def misalignment(self, w_star: np.ndarray) -> float:
        """Squared Euclidean deviation ``||w - w_star||**2``."""
        w_star = np.asarray(w_star, dtype=np.float64)
        if w_star.shape != (self.n,):
            raise ValueError(
                f"w_star has shape {w_star.shape}, expected ({self.n},)"
            )
        diff = self.w - w_star
        return float(np.dot(diff, diff))

    def sparsity(self, tol: float = 0.0) -> int:
        """Count of weight components with ``|w_i| > tol``.

        OLBI thresholding produces exact zeros, so ``tol=0`` is
        meaningful there; for the other variants pass a small tolerance
        to count effective zeros.
        """
        if tol < 0.0:
            raise ValueError(f"tol must be >= 0 (got {tol})")
        return int(np.count_nonzero(np.abs(self.w) > tol))


def make_filter(params: AlgoParams, n: int) -> AdaptiveFilter:
    """Zero-initialized filter of length ``n`` for the given algorithm."""
    return AdaptiveFilter(params, n)
