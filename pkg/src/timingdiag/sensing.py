"""Phase-swept sampling monitor.

A monitor samples its selected tap with a phase-shifted clock and counts
errors (stale pre-transition values) over a fixed window. Sweeping the phase
across the transition region yields per-phase error counts, either as exact
binomial expectations or as seeded Monte Carlo draws.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import ConstraintViolation, EmptyPhaseRange, TapNotAssigned
from .fabric import DelayTap, DmePlacement, TransitionStats
from .rng import STREAM_WINDOW, substream

MODE_EXACT = "exact"
MODE_MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class PhaseSweepConfig:
    phase_start: float  # ps
    phase_end: float    # ps
    phase_step: float = 20.0
    window_cycles: int = 1000
    settle_cycles: int = 8
    num_sweeps: int = 10
    mode: str = MODE_EXACT

    def __post_init__(self) -> None:
        if self.phase_step <= 0:
            raise ConstraintViolation("phase_step must be positive")
        if self.phase_end <= self.phase_start:
            raise ConstraintViolation("phase_end must exceed phase_start")
        if self.window_cycles < 1:
            raise ConstraintViolation("window_cycles must be >= 1")
        if self.num_sweeps < 1:
            raise ConstraintViolation("num_sweeps must be >= 1")
        if self.settle_cycles < 0:
            raise ConstraintViolation("settle_cycles must be >= 0")
        if self.mode not in (MODE_EXACT, MODE_MONTE_CARLO):
            raise ConstraintViolation(f"unknown sweep mode {self.mode!r}")

    @property
    def phase_count(self) -> int:
        return int(np.floor((self.phase_end - self.phase_start) / self.phase_step)) + 1

    def phase_times(self) -> np.ndarray:
        return self.phase_start + self.phase_step * np.arange(self.phase_count)


@dataclass(frozen=True)
class SampleWindowResult:
    phase_index: int
    sample_time: float  # ps
    error_count: int
    window_cycles: int


def error_probability(stats: TransitionStats, sample_time: float) -> float:
    """P(transition arrives after the sampling edge), i.e. the stale-capture rate.

    Gaussian transition time; degenerate sigma resolves ties toward the
    post-transition value.
    """
    if stats.sigma == 0.0:
        return 1.0 if sample_time < stats.mu else 0.0
    return float(ndtr((stats.mu - sample_time) / stats.sigma))


def error_probabilities(stats: TransitionStats, sample_times: np.ndarray) -> np.ndarray:
    if stats.sigma == 0.0:
        return (sample_times < stats.mu).astype(float)
    return ndtr((stats.mu - sample_times) / stats.sigma)


def _exact_count(p: float, window_cycles: int) -> int:
    return int(np.floor(window_cycles * p + 0.5))


def sample_error_count(stats: TransitionStats, sample_time: float, phase_index: int,
                       window_cycles: int, mode: str,
                       rng: np.random.Generator | None = None) -> SampleWindowResult:
    """Count errors over one observation window.

    Exact mode rounds the binomial expectation; Monte Carlo draws from the
    supplied keyed substream, so results depend only on the stream key.
    """
    p = error_probability(stats, sample_time)
    if mode == MODE_EXACT:
        count = _exact_count(p, window_cycles)
    elif mode == MODE_MONTE_CARLO:
        if rng is None:
            raise ConstraintViolation("monte_carlo sampling needs an rng substream")
        count = int(rng.binomial(window_cycles, p))
    else:
        raise ConstraintViolation(f"unknown sweep mode {mode!r}")
    return SampleWindowResult(phase_index=phase_index, sample_time=float(sample_time),
                              error_count=count, window_cycles=window_cycles)


def window_rng(seed: int, config_state_id: int, sweep_id: int, dme_id: int,
               dt_id: int, phase_index: int) -> np.random.Generator:
    """Substream for one sampling window.

    Keyed by every identifier that distinguishes windows, so any execution
    schedule reproduces identical counts.
    """
    return substream(seed, STREAM_WINDOW, config_state_id, sweep_id, dme_id,
                     dt_id, phase_index)


def run_phase_sweep(dme: DmePlacement, tap: DelayTap, stats: TransitionStats,
                    cfg: PhaseSweepConfig, seed: int, config_state_id: int,
                    sweep_id: int) -> list[SampleWindowResult]:
    """One complete sweep of a tap through a monitor.

    The effective transition statistics are held fixed (quasi-static
    realization); each window observes settle_cycles of dead time that is
    tracked only as schedule bookkeeping.
    """
    if tap.id not in dme.assigned_taps:
        raise TapNotAssigned(f"tap {tap.label} not in monitor {dme.id} chain")
    times = cfg.phase_times()
    if len(times) <= 0:
        raise EmptyPhaseRange("phase sweep contains no sample points")

    results: list[SampleWindowResult] = []
    if cfg.mode == MODE_EXACT:
        probs = error_probabilities(stats, times)
        counts = np.floor(cfg.window_cycles * probs + 0.5).astype(int)
        for k, (t, c) in enumerate(zip(times, counts)):
            results.append(SampleWindowResult(phase_index=k, sample_time=float(t),
                                              error_count=int(c),
                                              window_cycles=cfg.window_cycles))
    else:
        for k, t in enumerate(times):
            rng = window_rng(seed, config_state_id, sweep_id, dme.id, tap.id, k)
            results.append(sample_error_count(stats, float(t), k, cfg.window_cycles,
                                              cfg.mode, rng))
    return results
