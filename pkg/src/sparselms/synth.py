"""Reproducible sparse systems and input/observation streams.

A :class:`Scenario` fixes the ground truth once: the sparse weight
vector ``w_star`` (support drawn uniformly, nonzero values standard
Gaussian), the input power, and a noise power either given directly or
calibrated to a target SNR.  A :class:`SampleStream` then yields the
``(x_k, f_k)`` pairs with ``f_k = w_star @ x_k + noise``, fully
determined by its seed: replays are exact, and distinct seeds give
independent trials.

Two input structures are supported.  ``IID_VECTOR`` draws a fresh
Gaussian vector each step (the assumption behind the MSD theory);
``TAPPED_DELAY_LINE`` feeds a scalar Gaussian sequence through a shift
register, as a physical FIR identification run would.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

import numpy as np
from numba import njit

from .theory import noise_power_for_snr

__all__ = ["InputMode", "Scenario", "SampleStream", "make_scenario", "stream"]

# anything np.random.SeedSequence takes as entropy
Seed = int | list | tuple


class InputMode(str, Enum):
    IID_VECTOR = "iid_vector"
    TAPPED_DELAY_LINE = "tapped_delay_line"


@dataclass(frozen=True)
class Scenario:
    """Immutable ground-truth system for one experiment family."""

    w_star: np.ndarray
    n: int
    k0: int
    sigma_x2: float
    sigma_e2: float
    snr_db: float | None
    input_mode: InputMode

    def __post_init__(self):
        w = np.asarray(self.w_star, dtype=float)
        object.__setattr__(self, "w_star", w)
        if w.shape != (self.n,):
            raise ValueError(f"w_star has shape {w.shape}, expected ({self.n},)")
        if int(np.count_nonzero(w)) != self.k0:
            raise ValueError(
                f"w_star has {np.count_nonzero(w)} nonzeros but k0 = {self.k0}"
            )
        if not (self.sigma_x2 > 0.0):
            raise ValueError(f"sigma_x2 must be > 0 (got {self.sigma_x2})")
        if not (self.sigma_e2 >= 0.0):
            raise ValueError(f"sigma_e2 must be >= 0 (got {self.sigma_e2})")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k0": self.k0,
            "sigma_x2": self.sigma_x2,
            "sigma_e2": self.sigma_e2,
            "snr_db": self.snr_db,
            "input_mode": self.input_mode.value,
            "w_star": self.w_star.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        return cls(
            w_star=np.asarray(d["w_star"], dtype=float),
            n=int(d["n"]),
            k0=int(d["k0"]),
            sigma_x2=float(d["sigma_x2"]),
            sigma_e2=float(d["sigma_e2"]),
            snr_db=None if d.get("snr_db") is None else float(d["snr_db"]),
            input_mode=InputMode(d["input_mode"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))


def make_scenario(
    n: int,
    k0: int,
    sigma_x2: float = 1.0,
    snr_db: float | None = None,
    sigma_e2: float | None = None,
    input_mode: InputMode = InputMode.IID_VECTOR,
    seed: Seed = 0,
) -> Scenario:
    """Draw a sparse ground-truth system.

    ``k0`` support positions are chosen uniformly without replacement
    and filled with standard Gaussian values (exact zeros redrawn, so
    the support size is exact).  The noise power comes either from
    ``sigma_e2`` directly or from a target ``snr_db``; exactly one must
    be given, and ``k0 = 0`` requires an explicit ``sigma_e2`` since
    SNR is undefined for a silent system.
    """
    if not (0 <= k0 <= n):
        raise ValueError(f"k0 must lie in [0, n] (got k0={k0}, n={n})")
    if (snr_db is None) == (sigma_e2 is None):
        raise ValueError("exactly one of snr_db / sigma_e2 must be given")
    if k0 == 0 and snr_db is not None:
        raise ValueError("k0=0 has no defined SNR; pass sigma_e2 explicitly")
    rng = np.random.default_rng(seed)
    w_star = np.zeros(n)
    support = rng.choice(n, size=k0, replace=False)
    values = rng.standard_normal(k0)
    while np.any(values == 0.0):  # probability ~0, but keeps k0 exact
        redraw = values == 0.0
        values[redraw] = rng.standard_normal(int(redraw.sum()))
    w_star[support] = values
    if sigma_e2 is None:
        sigma_e2 = noise_power_for_snr(w_star, sigma_x2, snr_db)
    return Scenario(
        w_star=w_star,
        n=n,
        k0=k0,
        sigma_x2=float(sigma_x2),
        sigma_e2=float(sigma_e2),
        snr_db=snr_db,
        input_mode=InputMode(input_mode),
    )


@njit(cache=True)
def _noiseless_outputs(X, w, out):
    # row-wise dot with a fixed summation order, so outputs do not
    # depend on how the stream is blocked (BLAS would reorder)
    B, n = X.shape
    for j in range(B):
        acc = 0.0
        for i in range(n):
            acc += X[j, i] * w[i]
        out[j] = acc


class SampleStream:
    """Deterministic ``(x_k, f_k)`` source for one trial.

    Input and noise come from two generators split off the seed, and
    outputs use a fixed summation order, so the sample sequence does
    not depend on how it is blocked.  The noise is independent of the
    input by construction.  Single-threaded; use one stream per worker.
    """

    def __init__(self, scenario: Scenario, seed: Seed):
        self.scenario = scenario
        x_seq, e_seq = np.random.SeedSequence(seed).spawn(2)
        self._x_rng = np.random.default_rng(x_seq)
        self._e_rng = np.random.default_rng(e_seq)
        self._sigma_x = float(np.sqrt(scenario.sigma_x2))
        self._sigma_e = float(np.sqrt(scenario.sigma_e2))
        # delay-line register: the n-1 most recent past inputs
        self._tail = np.zeros(scenario.n - 1)

    def next_block(self, size: int) -> tuple[np.ndarray, np.ndarray]:
        """Next ``size`` samples as a ``(size, n)`` matrix and length-``size`` vector."""
        sc = self.scenario
        if sc.input_mode is InputMode.IID_VECTOR:
            x = self._x_rng.standard_normal((size, sc.n))
            if self._sigma_x != 1.0:
                x *= self._sigma_x
        else:
            u = self._x_rng.standard_normal(size)
            if self._sigma_x != 1.0:
                u *= self._sigma_x
            buf = np.concatenate((self._tail, u))
            windows = np.lib.stride_tricks.sliding_window_view(buf, sc.n)
            x = np.ascontiguousarray(windows[:, ::-1])  # x_k = [u_k, u_{k-1}, ...]
            if sc.n > 1:
                self._tail = buf[-(sc.n - 1):].copy()
        f = np.empty(size)
        _noiseless_outputs(x, sc.w_star, f)
        if self._sigma_e != 0.0:
            f += self._sigma_e * self._e_rng.standard_normal(size)
        return x, f

    def blocks(
        self, steps: int, block_size: int = 512
    ) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        """Yield ``(X, F)`` blocks covering ``steps`` samples in order."""
        remaining = steps
        while remaining > 0:
            take = min(block_size, remaining)
            yield self.next_block(take)
            remaining -= take

    def pairs(self, steps: int) -> Iterator[tuple[np.ndarray, float]]:
        """Yield individual ``(x_k, f_k)`` samples; same sequence as blocks()."""
        for x, f in self.blocks(steps):
            for j in range(f.shape[0]):
                yield x[j], float(f[j])


def stream(scenario: Scenario, seed: Seed) -> SampleStream:
    """Open a deterministic sample stream over ``scenario``."""
    return SampleStream(scenario, seed)
