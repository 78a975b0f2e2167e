import math

import numpy as np
import pytest

from timingdiag.errors import (InsufficientSweeps, SubsetTooLarge, TooFewPairs,
                               ZeroVarianceReference, ZeroVarianceSeries)
from timingdiag.rng import substream
from timingdiag.spatial import (DelaySeriesSet, correlation_heatmap,
                                dme_count_scaling, fit_decay_length, pearson,
                                per_sweep_delay_series, PairCorrelation,
                                spatial_correlation_curve, spearman)


def brute_force_pearson(x, y):
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sx = math.sqrt(sum((a - mx) ** 2 for a in x))
    sy = math.sqrt(sum((b - my) ** 2 for b in y))
    return sxy / (sx * sy)


def test_pearson_hand_dataset():
    assert pearson(np.array([1, 2, 3, 4.0]), np.array([2, 4, 6, 8.0])) == 1.0


def test_pearson_matches_brute_force_oracle():
    rng = substream(555, 9)
    for _ in range(25):
        x = rng.normal(size=100)
        y = 0.4 * x + rng.normal(size=100)
        assert abs(pearson(x, y) - brute_force_pearson(list(x), list(y))) < 1e-12


def test_pearson_zero_variance_rejected():
    with pytest.raises(ZeroVarianceSeries):
        pearson(np.ones(5), np.arange(5.0))


def test_pearson_null_distribution():
    rng = substream(777, 9)
    inside = 0
    trials = 200
    for _ in range(trials):
        x = rng.normal(size=200)
        y = rng.normal(size=200)
        if abs(pearson(x, y)) < 0.2:
            inside += 1
    assert inside / trials >= 0.97


def test_spearman_monotone_with_ties():
    assert spearman(np.array([0.0, 0, 0, 1, 2, 3]), np.array([1.0, 2, 3, 4, 5, 6])) > 0.8


def _series(keys, positions, matrix):
    return DelaySeriesSet(keys=keys, positions=positions,
                          medians=np.asarray(matrix, dtype=float), degenerate={})


def test_curve_identical_series_r_one():
    keys = [(0, 0), (1, 1)]
    pos = {(0, 0): (0, 0), (1, 1): (3, 0)}
    base = [1.0, 2.0, 3.0, 4.0]
    curve = spatial_correlation_curve(_series(keys, pos, [base, base]), 10.0)
    assert curve.entries[0].r == pytest.approx(1.0)
    assert curve.entries[0].distance == 3.0
    assert curve.entries[0].distance_norm == pytest.approx(0.3)


def test_curve_requires_two_usable_series():
    keys = [(0, 0), (1, 1)]
    pos = {(0, 0): (0, 0), (1, 1): (3, 0)}
    with pytest.raises(TooFewPairs):
        spatial_correlation_curve(_series(keys, pos, [[1, 2, 3, 4], [5, 5, 5, 5]]), 10.0)


def test_curve_flags_zero_variance_pairs():
    keys = [(0, 0), (1, 1), (2, 2)]
    pos = {(0, 0): (0, 0), (1, 1): (3, 0), (2, 2): (6, 0)}
    m = [[1, 2, 3, 4], [2, 4, 6, 8], [7, 7, 7, 7]]
    curve = spatial_correlation_curve(_series(keys, pos, m), 10.0)
    assert len(curve.entries) == 1
    assert curve.excluded_pairs == 2


def _decay_entries(length, rng, n=120, noise=0.0):
    entries = []
    for _ in range(n):
        d = rng.uniform(0.5, 10.0)
        r = math.exp(-d / length) + (rng.normal() * noise if noise else 0.0)
        entries.append(PairCorrelation((0, 0), (1, 1), d, d / 10.0,
                                       min(r, 0.999), 20))
    return entries


def _bin_entries(entries, width=1.0):
    binned = []
    max_d = max(e.distance for e in entries)
    for k in range(int(max_d // width) + 1):
        rs = [e.r for e in entries if k * width <= e.distance < (k + 1) * width]
        if rs:
            binned.append((k * width + width / 2, float(np.mean(rs)), len(rs)))
    return binned


def test_decay_fit_recovers_known_length():
    rng = substream(31, 9)
    entries = _decay_entries(6.0, rng)
    fit = fit_decay_length(entries, _bin_entries(entries))
    assert fit.method == "loglinear"
    assert fit.length == pytest.approx(6.0, rel=0.05)


def test_decay_fit_falls_back_when_incoherent():
    rng = substream(32, 9)
    entries = _decay_entries(0.4, rng, noise=0.05)
    fit = fit_decay_length(entries, _bin_entries(entries))
    assert fit.method == "threshold"
    assert fit.length < 2.0


def test_scaling_subset_too_large():
    keys = [(0, 0), (1, 1)]
    pos = {(0, 0): (0, 0), (1, 1): (3, 0)}
    series = _series(keys, pos, [[1, 2, 3, 4], [2, 4, 6, 9]])
    with pytest.raises(SubsetTooLarge):
        dme_count_scaling(series, [3], seed=1)


def test_scaling_full_subset_zero_width():
    rng = substream(99, 9)
    keys = [(i, i) for i in range(6)]
    pos = {(i, i): (i, 0) for i in range(6)}
    m = rng.normal(size=(6, 30))
    pts = dme_count_scaling(_series(keys, pos, m), [2, 6], seed=5, reps=50)
    assert pts[1].ci_high - pts[1].ci_low == 0.0
    assert pts[0].ci_high >= pts[0].ci_low


def test_heatmap_reference_cell_exact_one():
    rng = substream(98, 9)
    keys = [(i, i) for i in range(5)]
    pos = {(i, i): (i * 2, 1) for i in range(5)}
    m = rng.normal(size=(5, 40))
    hm = correlation_heatmap(_series(keys, pos, m))
    assert hm.cells[hm.reference][1] == 1.0
    assert len(hm.cells) == 5


def test_heatmap_symmetry():
    rng = substream(97, 9)
    keys = [(0, 0), (1, 1)]
    pos = {(0, 0): (0, 0), (1, 1): (5, 5)}
    m = rng.normal(size=(2, 25))
    series = _series(keys, pos, m)
    a = correlation_heatmap(series, reference=(0, 0))
    b = correlation_heatmap(series, reference=(1, 1))
    assert a.cells[(1, 1)][1] == pytest.approx(b.cells[(0, 0)][1], abs=1e-12)


def test_heatmap_zero_variance_reference():
    keys = [(0, 0), (1, 1)]
    pos = {(0, 0): (0, 0), (1, 1): (5, 5)}
    series = _series(keys, pos, [[3, 3, 3, 3], [1, 2, 3, 4]])
    with pytest.raises(ZeroVarianceReference):
        correlation_heatmap(series, reference=(0, 0))


def _store_series_fixture():
    from timingdiag.campaign import execute_campaign
    from timingdiag.scenario import build_campaign, parse_scenario

    sc = parse_scenario("""
[fabric]
width = 9
height = 8
seed = 3

[taps]
placement = chain
count = 3
chain_source = 0,0
chain_dest = 8,7
chain_dme = 0,0

[sweep]
num_sweeps = 4

[condition.baseline]
kind = baseline

[condition.stress]
kind = pdn_stress
fluct_std = 0.05
""")
    layout, conditions, plan = build_campaign(sc)
    store = execute_campaign(plan, layout.fabric, layout.paths, layout.taps, layout.dmes)
    return layout, plan, store


def test_per_sweep_series_shape_and_flags():
    layout, plan, store = _store_series_fixture()
    cfg = plan.sweep_cfg
    series = per_sweep_delay_series(store, 1, layout.schedule, layout.taps,
                                    cfg.phase_start, cfg.phase_step, cfg.num_sweeps)
    assert series.medians.shape == (3, 4)
    assert not np.isnan(series.medians).any()
    assert series.degenerate == {}
    # baseline in exact mode: constant series, excluded from correlation
    base = per_sweep_delay_series(store, 0, layout.schedule, layout.taps,
                                  cfg.phase_start, cfg.phase_step, cfg.num_sweeps)
    with pytest.raises(TooFewPairs):
        spatial_correlation_curve(base, 10.0)


def test_per_sweep_series_needs_two_sweeps():
    layout, plan, store = _store_series_fixture()
    with pytest.raises(InsufficientSweeps):
        per_sweep_delay_series(store, 1, layout.schedule, layout.taps,
                               plan.sweep_cfg.phase_start, plan.sweep_cfg.phase_step, 1)
