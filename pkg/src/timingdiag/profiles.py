"""BER-profile reconstruction and delay-statistic extraction.

Profiles aggregate error counts per phase, are clamped to monotone
non-increasing form (L2 projection via pool-adjacent-violators), and yield
delay statistics through quantiles of the empirical CDF F = 1 - BER. Quantile
estimators are robust to truncated tails, which is why they stand in for
moments throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import isotonic_regression
from scipy.special import ndtr, ndtri

from .campaign import MeasurementRecord
from .errors import EmptyInput, GapInPhaseGrid, TransitionOutOfRange

F_HI = float(ndtr(1.0))     # 0.8413..., one-sigma CDF quantile
F_LO = 1.0 - F_HI
COVERAGE_START = 0.99       # BER must reach this at the first phase
COVERAGE_END = 0.01         # and fall below this at the last


@dataclass(frozen=True)
class BerProfile:
    times: np.ndarray        # ps, strictly increasing phase grid
    ber: np.ndarray          # clamped, monotone non-increasing
    raw_ber: np.ndarray      # pre-clamp aggregate
    monotone_clamped: bool   # clamping changed at least one value
    coverage_complete: bool
    window_cycles: int
    n_sweeps: int

    @property
    def phase_step(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0


@dataclass(frozen=True)
class DelayStats:
    median: float     # ps, phase of the 0.5 BER crossing
    sigma_est: float  # ps, half-spread of the one-sigma quantiles
    q05: float
    q95: float


@dataclass(frozen=True)
class DeltaStats:
    delta_mu: float
    delta_mu_rel: float
    delta_sigma: float
    delta_mu_steps: float
    delta_sigma_steps: float


def pav_clamp(values: np.ndarray) -> np.ndarray:
    """L2-nearest monotone non-increasing sequence (pool adjacent violators)."""
    values = np.asarray(values, dtype=float)
    if len(values) <= 1:
        return values.copy()
    return np.asarray(isotonic_regression(values, increasing=False).x, dtype=float)


def reconstruct_profile(records: list[MeasurementRecord], phase_start: float,
                        phase_step: float) -> BerProfile:
    """Aggregate records for one (monitor, tap, condition) into a BER profile.

    Callers select the sweeps: pass every sweep's records for an aggregate
    profile or a single sweep's records for a per-sweep one.
    """
    if not records:
        raise EmptyInput("no records to reconstruct a profile from")
    phases = sorted({r.phase_index for r in records})
    lo, hi = phases[0], phases[-1]
    if phases != list(range(lo, hi + 1)):
        raise GapInPhaseGrid(f"phase indices {lo}..{hi} have gaps")
    err = np.zeros(hi - lo + 1)
    win = np.zeros(hi - lo + 1)
    per_phase = np.zeros(hi - lo + 1, dtype=int)
    for r in records:
        err[r.phase_index - lo] += r.error_count
        win[r.phase_index - lo] += r.window_cycles
        per_phase[r.phase_index - lo] += 1
    if len(set(per_phase.tolist())) != 1:
        raise GapInPhaseGrid("uneven record count across phases")
    sweeps = len({r.sweep_id for r in records})
    raw = err / win
    clamped = pav_clamp(raw)
    times = phase_start + phase_step * np.arange(lo, hi + 1)
    return BerProfile(times=times, ber=clamped, raw_ber=raw,
                      monotone_clamped=bool(np.any(clamped != raw)),
                      coverage_complete=bool(clamped[0] >= COVERAGE_START
                                             and clamped[-1] <= COVERAGE_END),
                      window_cycles=int(records[0].window_cycles),
                      n_sweeps=sweeps)


def _quantile_time(times: np.ndarray, cdf: np.ndarray, q: float) -> float:
    """First-crossing linear interpolation of the quantile time."""
    idx = int(np.searchsorted(cdf, q, side="left"))
    if idx <= 0:
        return float(times[0])
    if idx >= len(cdf):
        return float(times[-1])
    f0, f1 = cdf[idx - 1], cdf[idx]
    if f1 == f0:
        return float(times[idx])
    frac = (q - f0) / (f1 - f0)
    return float(times[idx - 1] + frac * (times[idx] - times[idx - 1]))


def extract_delay_stats(profile: BerProfile) -> DelayStats:
    """Quantile-based delay statistics from a complete profile."""
    if not profile.coverage_complete:
        raise TransitionOutOfRange(
            "profile does not saturate at the sweep endpoints; widen the phase range")
    cdf = 1.0 - profile.ber
    median = _quantile_time(profile.times, cdf, 0.5)
    t_lo = _quantile_time(profile.times, cdf, F_LO)
    t_hi = _quantile_time(profile.times, cdf, F_HI)
    return DelayStats(median=median, sigma_est=(t_hi - t_lo) / 2.0,
                      q05=_quantile_time(profile.times, cdf, 0.05),
                      q95=_quantile_time(profile.times, cdf, 0.95))


def empirical_cdf(profile: BerProfile) -> tuple[np.ndarray, np.ndarray]:
    """(times, F) with F = 1 - BER clipped to [0, 1]."""
    return profile.times.copy(), np.clip(1.0 - profile.ber, 0.0, 1.0)


def compute_delta(baseline: DelayStats, stressed: DelayStats,
                  phase_step: float) -> DeltaStats:
    d_mu = stressed.median - baseline.median
    d_sigma = stressed.sigma_est - baseline.sigma_est
    return DeltaStats(delta_mu=d_mu,
                      delta_mu_rel=d_mu / baseline.median,
                      delta_sigma=d_sigma,
                      delta_mu_steps=d_mu / phase_step,
                      delta_sigma_steps=d_sigma / phase_step)


_PROBIT_CLIP = 1e-9


def _probit_curve(profile: BerProfile) -> tuple[np.ndarray, np.ndarray]:
    # A Gaussian transition is linear in the probit domain, so piecewise-linear
    # interpolation there is nearly exact even on a coarse phase grid.
    times, cdf = empirical_cdf(profile)
    z = ndtri(np.clip(cdf, _PROBIT_CLIP, 1.0 - _PROBIT_CLIP))
    return times, z


def interp_cdf(profile: BerProfile, at: np.ndarray) -> np.ndarray:
    """CDF values at arbitrary times via probit-domain linear interpolation."""
    times, z = _probit_curve(profile)
    return ndtr(np.interp(at, times, z))


def probit_median(profile: BerProfile) -> float:
    """Median crossing located in the probit domain (used for curve alignment)."""
    times, z = _probit_curve(profile)
    return _quantile_time(times, z, 0.0)


def aligned_cdf_deviation(baseline: BerProfile, stressed: BerProfile,
                          resolution: float = 1.0) -> float:
    """Max vertical CDF deviation after removing the median shift.

    A mechanism that only translates the transition leaves this near zero; one
    that broadens it does not.
    """
    shift = probit_median(stressed) - probit_median(baseline)
    lo = max(baseline.times[0], stressed.times[0] - shift)
    hi = min(baseline.times[-1], stressed.times[-1] - shift)
    if hi <= lo:
        return 1.0
    grid = np.arange(lo, hi, resolution)
    vb = interp_cdf(baseline, grid)
    vs = interp_cdf(stressed, grid + shift)
    return float(np.max(np.abs(vb - vs)))


def cdf_median_slope(profile: BerProfile, half_window: float = 2.0) -> float:
    """Slope of the empirical CDF at its median crossing (1/ps)."""
    stats = extract_delay_stats(profile)
    at = np.asarray([stats.median - half_window, stats.median + half_window])
    lo, hi = interp_cdf(profile, at)
    return float((hi - lo) / (2.0 * half_window))
