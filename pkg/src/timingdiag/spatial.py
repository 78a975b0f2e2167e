"""Spatial correlation analysis across distributed monitors.

Per-sweep delay series are correlated pairwise over sweeps; the resulting
correlation-versus-distance structure separates globally coherent supply
stress (slow decay) from localized routing perturbations (fast decay). The
repetition unit is one full sweep: a single window yields one phase point,
not a delay estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .campaign import RecordStore
from .errors import (InsufficientSweeps, SubsetTooLarge, TooFewPairs,
                     TransitionOutOfRange, ZeroVarianceReference, ZeroVarianceSeries)
from .fabric import Coord, DelayTap
from .profiles import extract_delay_stats, reconstruct_profile
from .rng import STREAM_SUBSET, substream

SeriesKey = tuple[int, int]  # (dme_id, dt_id)


def pearson(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation; rejects degenerate series instead of returning NaN."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(np.sum(xc * xc))
    syy = float(np.sum(yc * yc))
    if sxx == 0.0 or syy == 0.0:
        raise ZeroVarianceSeries("pearson input has zero variance")
    return float(np.sum(xc * yc) / math.sqrt(sxx * syy))


def spearman(x: np.ndarray, y: np.ndarray) -> float:
    """Spearman rank correlation with average ranks for ties."""
    from scipy.stats import spearmanr
    return float(spearmanr(x, y).statistic)


@dataclass(frozen=True)
class DelaySeriesSet:
    keys: list[SeriesKey]
    positions: dict[SeriesKey, Coord]  # tap coordinates (the observed location)
    medians: np.ndarray                # (n_series, n_sweeps), NaN where degenerate
    degenerate: dict[SeriesKey, list[int]]  # flagged sweep ids per series

    @property
    def n_sweeps(self) -> int:
        return self.medians.shape[1]

    def series(self, key: SeriesKey) -> np.ndarray:
        return self.medians[self.keys.index(key)]


def per_sweep_delay_series(store: RecordStore, config_state_id: int,
                           schedule: list[SeriesKey] | tuple[SeriesKey, ...],
                           taps: dict[int, DelayTap], phase_start: float,
                           phase_step: float, num_sweeps: int) -> DelaySeriesSet:
    """Median delay per sweep for every scheduled (monitor, tap) pair.

    Sweeps whose profile does not cover the transition are flagged NaN rather
    than silently dropped.
    """
    if num_sweeps < 2:
        raise InsufficientSweeps(f"need >= 2 sweeps, got {num_sweeps}")
    keys = [(dme_id, dt_id) for dme_id, dt_id in schedule]
    medians = np.full((len(keys), num_sweeps), np.nan)
    degenerate: dict[SeriesKey, list[int]] = {k: [] for k in keys}
    for i, (dme_id, dt_id) in enumerate(keys):
        for sweep in range(num_sweeps):
            records = store.query(config_state_id=config_state_id, dme_id=dme_id,
                                  dt_id=dt_id, sweep_id=sweep)
            profile = reconstruct_profile(records, phase_start, phase_step)
            try:
                medians[i, sweep] = extract_delay_stats(profile).median
            except TransitionOutOfRange:
                degenerate[(dme_id, dt_id)].append(sweep)
    positions = {(dme_id, dt_id): taps[dt_id].position for dme_id, dt_id in keys}
    return DelaySeriesSet(keys=keys, positions=positions, medians=medians,
                          degenerate={k: v for k, v in degenerate.items() if v})


@dataclass(frozen=True)
class PairCorrelation:
    key_i: SeriesKey
    key_j: SeriesKey
    distance: float       # CLB units
    distance_norm: float  # divided by the region diagonal
    r: float
    n_sweeps: int


@dataclass(frozen=True)
class DecayFit:
    length: float  # CLB units
    method: str    # "loglinear" or "threshold"


@dataclass(frozen=True)
class CorrelationCurve:
    entries: list[PairCorrelation]
    binned: list[tuple[float, float, int]]  # (bin center, mean r, pair count)
    decay: DecayFit
    excluded_pairs: int  # dropped for zero variance


def _usable_rows(series: DelaySeriesSet) -> list[int]:
    rows = []
    for i in range(len(series.keys)):
        vals = series.medians[i]
        vals = vals[~np.isnan(vals)]
        # ptp == 0 catches constant series that summation round-off would
        # otherwise give a spurious 1e-13 standard deviation
        if len(vals) >= 2 and float(np.ptp(vals)) > 0.0:
            rows.append(i)
    return rows


def _pair_r(series: DelaySeriesSet, i: int, j: int) -> tuple[float, int] | None:
    a = series.medians[i]
    b = series.medians[j]
    ok = ~(np.isnan(a) | np.isnan(b))
    if int(ok.sum()) < 2:
        return None
    try:
        return pearson(a[ok], b[ok]), int(ok.sum())
    except ZeroVarianceSeries:
        return None


def fit_decay_length(entries: list[PairCorrelation],
                     binned: list[tuple[float, float, int]],
                     fit_r_min: float = 0.05,
                     fallback_r: float = 0.5) -> DecayFit:
    """Log-linear least squares of ln(r) on distance, with a binned fallback.

    The fit is meaningful only when correlation is coherent at short range
    (first distance bin above fallback_r); otherwise the decay is shorter than
    one bin and the threshold crossing of the binned means is reported
    instead. Pairs below fit_r_min carry no usable log signal.
    """
    coherent = bool(binned) and binned[0][1] >= fallback_r
    if coherent:
        pts = [(e.distance, math.log(e.r)) for e in entries if e.r > fit_r_min]
        if len(pts) >= 3:
            d = np.asarray([p[0] for p in pts])
            lr = np.asarray([p[1] for p in pts])
            slope, _ = np.polyfit(d, lr, 1)
            if slope < 0.0:
                return DecayFit(length=float(-1.0 / slope), method="loglinear")
    for center, mean_r, count in binned:
        if count > 0 and mean_r < fallback_r:
            return DecayFit(length=float(center), method="threshold")
    max_d = max((e.distance for e in entries), default=0.0)
    return DecayFit(length=float(max_d), method="threshold")


def spatial_correlation_curve(series: DelaySeriesSet, region_diagonal: float,
                              bin_width: float = 1.0, fit_r_min: float = 0.05,
                              fallback_r: float = 0.5) -> CorrelationCurve:
    rows = _usable_rows(series)
    if len(rows) < 2:
        raise TooFewPairs("need >= 2 series with sweep-to-sweep variance")
    entries: list[PairCorrelation] = []
    excluded = 0
    for a in range(len(rows)):
        for b in range(a + 1, len(rows)):
            i, j = rows[a], rows[b]
            res = _pair_r(series, i, j)
            if res is None:
                excluded += 1
                continue
            r, n = res
            pi = series.positions[series.keys[i]]
            pj = series.positions[series.keys[j]]
            d = math.dist(pi, pj)
            entries.append(PairCorrelation(key_i=series.keys[i], key_j=series.keys[j],
                                           distance=d,
                                           distance_norm=d / region_diagonal,
                                           r=r, n_sweeps=n))
    # rows outside `rows` were zero-variance; every pair touching them is excluded
    n_all = len(series.keys)
    excluded += (n_all * (n_all - 1)) // 2 - (len(rows) * (len(rows) - 1)) // 2
    if not entries:
        raise TooFewPairs("no pair had two usable series")

    max_d = max(e.distance for e in entries)
    n_bins = int(math.floor(max_d / bin_width)) + 1
    binned = []
    for k in range(n_bins):
        lo, hi = k * bin_width, (k + 1) * bin_width
        rs = [e.r for e in entries if lo <= e.distance < hi]
        if rs:
            binned.append((lo + bin_width / 2.0, float(np.mean(rs)), len(rs)))
    decay = fit_decay_length(entries, binned, fit_r_min, fallback_r)
    return CorrelationCurve(entries=entries, binned=binned, decay=decay,
                            excluded_pairs=excluded)


@dataclass(frozen=True)
class ScalingPoint:
    n: int
    mean_r: float
    ci_low: float
    ci_high: float


def dme_count_scaling(series: DelaySeriesSet, subset_sizes: list[int],
                      seed: int, reps: int = 200) -> list[ScalingPoint]:
    """Mean pairwise correlation of compact monitor deployments of size n.

    Each rep draws a seeded random anchor monitor and takes its n spatially
    nearest neighbours (anchor included), emulating a denser deployment grown
    around a point; the CI is the 2.5/97.5 percentile over reps. Compactness
    is what lets localized mechanisms show falling mean correlation as
    coverage expands.
    """
    rows = _usable_rows(series)
    if len(rows) < 2:
        raise TooFewPairs("need >= 2 usable series for scaling analysis")
    pts = np.asarray([series.positions[series.keys[i]] for i in rows], dtype=float)
    n_usable = len(rows)
    rmat = np.full((n_usable, n_usable), np.nan)
    for a in range(n_usable):
        rmat[a, a] = 1.0
        for b in range(a + 1, n_usable):
            res = _pair_r(series, rows[a], rows[b])
            if res is not None:
                rmat[a, b] = rmat[b, a] = res[0]

    out: list[ScalingPoint] = []
    for n in subset_sizes:
        if n > n_usable:
            raise SubsetTooLarge(f"subset size {n} exceeds {n_usable} usable monitors")
        if n < 2:
            raise SubsetTooLarge("subset size must be >= 2")
        rng = substream(seed, STREAM_SUBSET, n)
        values = []
        for _ in range(reps):
            anchor = int(rng.integers(n_usable))
            d = np.linalg.norm(pts - pts[anchor], axis=1)
            subset = np.sort(np.lexsort((np.arange(n_usable), d))[:n])
            sub = rmat[np.ix_(subset, subset)]
            iu = np.triu_indices(n, k=1)
            vals = sub[iu]
            vals = vals[~np.isnan(vals)]
            if len(vals):
                values.append(float(np.mean(vals)))
        arr = np.asarray(values)
        out.append(ScalingPoint(n=n, mean_r=float(arr.mean()),
                                ci_low=float(np.percentile(arr, 2.5)),
                                ci_high=float(np.percentile(arr, 97.5))))
    return out


@dataclass(frozen=True)
class HeatmapGrid:
    reference: SeriesKey
    reference_position: Coord
    cells: dict[SeriesKey, tuple[Coord, float]]  # key -> (position, r)


def correlation_heatmap(series: DelaySeriesSet,
                        reference: SeriesKey | None = None) -> HeatmapGrid:
    """Correlation of every usable series against one reference monitor.

    Default reference is the usable series closest to the instrumented
    centroid. The reference cell is exactly 1.
    """
    rows = _usable_rows(series)
    usable_keys = [series.keys[i] for i in rows]
    if reference is None:
        if not rows:
            raise ZeroVarianceReference("no series has sweep-to-sweep variance")
        pts = np.asarray([series.positions[k] for k in usable_keys], dtype=float)
        centroid = pts.mean(axis=0)
        reference = usable_keys[int(np.argmin(np.linalg.norm(pts - centroid, axis=1)))]
    if reference not in usable_keys:
        raise ZeroVarianceReference(f"reference {reference} has no variance")
    ref_row = series.keys.index(reference)
    cells: dict[SeriesKey, tuple[Coord, float]] = {
        reference: (series.positions[reference], 1.0)}
    for i in rows:
        key = series.keys[i]
        if key == reference:
            continue
        res = _pair_r(series, ref_row, i)
        if res is None:
            continue
        cells[key] = (series.positions[key], res[0])
    return HeatmapGrid(reference=reference,
                       reference_position=series.positions[reference],
                       cells=cells)
