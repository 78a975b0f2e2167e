"""End-to-end orchestration: run a scenario, analyze records, assemble reports.

The same functions back the command-line client and the HTTP service, so a
scenario produces byte-identical artifacts whichever way it is driven.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import __version__
from .campaign import CampaignPlan, RecordStore, execute_campaign
from .classify import MechanismVerdict, build_evidence, classify_mechanism
from .degradation import ConditionState
from .errors import TimingDiagError, TooFewPairs, ZeroVarianceReference
from .profiles import BerProfile, DelayStats, compute_delta, extract_delay_stats, reconstruct_profile
from .scenario import Layout, Scenario, build_campaign
from .spatial import (CorrelationCurve, HeatmapGrid, correlation_heatmap,
                      dme_count_scaling, per_sweep_delay_series,
                      spatial_correlation_curve)

# Hardware-envelope documentation constants echoed into every report. They
# bound what a physical deployment could observe; nothing simulated here
# depends on them.
INSTRUMENT_LIMITS = {
    "max_signal_frequency_mhz": 300.0,
    "phase_resolution_ps": [15.0, 20.0],
    "timing_accuracy_phase_steps": 1.0,
}


log = logging.getLogger(__name__)


@dataclass
class PipelineResult:
    scenario: Scenario
    layout: Layout
    conditions: list[ConditionState]
    plan: CampaignPlan
    store: RecordStore


def run_scenario(sc: Scenario, workers: int = 1) -> PipelineResult:
    layout, conditions, plan = build_campaign(sc)
    log.info("campaign: %d conditions x %d pairs x %d sweeps x %d phases = %d windows",
             len(conditions), len(plan.schedule), plan.sweep_cfg.num_sweeps,
             plan.sweep_cfg.phase_count, plan.total_windows)
    store = execute_campaign(plan, layout.fabric, layout.paths, layout.taps,
                             layout.dmes, workers=workers,
                             metadata={"seed": plan.seed})
    return PipelineResult(scenario=sc, layout=layout, conditions=conditions,
                          plan=plan, store=store)


def _check_store_matches_plan(plan: CampaignPlan, store: RecordStore) -> None:
    if len(store) != plan.total_windows:
        raise TimingDiagError(
            f"record store has {len(store)} records but the scenario plans "
            f"{plan.total_windows}; records and scenario do not match")


def _series_key(dme_id: int, dt_id: int) -> str:
    return f"{dme_id}:{dt_id}"


def _profile_for(store: RecordStore, plan: CampaignPlan, config_state_id: int,
                 dme_id: int, dt_id: int) -> BerProfile:
    records = store.query(config_state_id=config_state_id, dme_id=dme_id, dt_id=dt_id)
    return reconstruct_profile(records, plan.sweep_cfg.phase_start,
                               plan.sweep_cfg.phase_step)


def _delay_stats_dict(s: DelayStats) -> dict:
    return {"median_ps": s.median, "sigma_est_ps": s.sigma_est,
            "q05_ps": s.q05, "q95_ps": s.q95}


def _curve_dict(curve: CorrelationCurve | None) -> dict | None:
    if curve is None:
        return None
    return {
        "pairs": [{"dme_i": e.key_i[0], "dt_i": e.key_i[1],
                   "dme_j": e.key_j[0], "dt_j": e.key_j[1],
                   "distance_clb": e.distance, "distance_norm": e.distance_norm,
                   "r": e.r, "n_sweeps": e.n_sweeps} for e in curve.entries],
        "binned": [{"distance_clb": c, "mean_r": m, "count": n}
                   for c, m, n in curve.binned],
        "decay_length_clb": curve.decay.length,
        "decay_fit_method": curve.decay.method,
        "excluded_pairs": curve.excluded_pairs,
    }


def _heatmap_dict(hm: HeatmapGrid | None) -> dict | None:
    if hm is None:
        return None
    return {
        "reference": {"dme_id": hm.reference[0], "dt_id": hm.reference[1],
                      "x": hm.reference_position[0], "y": hm.reference_position[1]},
        "cells": [{"dme_id": k[0], "dt_id": k[1], "x": pos[0], "y": pos[1], "r": r}
                  for k, (pos, r) in sorted(hm.cells.items())],
    }


def _verdict_dict(v: MechanismVerdict) -> dict:
    ev = v.evidence
    th = v.thresholds
    return {
        "class": v.label,
        "evidence": {
            "mean_shift_rel": ev.mean_shift_rel,
            "shift_uniformity_cv": (None if math.isinf(ev.shift_uniformity_cv)
                                    else ev.shift_uniformity_cv),
            "median_sigma_steps": ev.median_sigma_steps,
            "max_sigma_steps": ev.max_sigma_steps,
            "decay_length_clb": ev.decay_length,
            "n_taps": ev.n_taps,
        },
        "thresholds": {
            "detect": th.detect, "uniformity_cv": th.uniformity_cv,
            "sigma_steps": th.sigma_steps, "sigma_steps_max": th.sigma_steps_max,
            "decay_pdn": th.decay_pdn, "decay_routing": th.decay_routing,
        },
    }


def analyze(sc: Scenario, store: RecordStore,
            result: PipelineResult | None = None) -> dict:
    """Assemble the full analysis report for a scenario's record store.

    When no live PipelineResult is given (records arriving from a CSV), the
    layout and plan are rebuilt deterministically from the scenario.
    """
    if result is not None:
        layout, conditions, plan = result.layout, result.conditions, result.plan
    else:
        layout, conditions, plan = build_campaign(sc)
    _check_store_matches_plan(plan, store)
    cfg = plan.sweep_cfg
    step = cfg.phase_step
    baseline = conditions[0]
    stressed = [c for c in conditions[1:]]

    profiles: dict[str, dict[str, dict]] = {}
    delay_stats: dict[str, dict[str, dict]] = {}
    stats_cache: dict[tuple[int, int, int], DelayStats] = {}
    for cond in conditions:
        cid = str(cond.config_state_id)
        profiles[cid] = {}
        delay_stats[cid] = {}
        for dme_id, dt_id in plan.schedule:
            profile = _profile_for(store, plan, cond.config_state_id, dme_id, dt_id)
            stats = extract_delay_stats(profile)
            stats_cache[(cond.config_state_id, dme_id, dt_id)] = stats
            key = _series_key(dme_id, dt_id)
            profiles[cid][key] = {
                "label": layout.taps[dt_id].label,
                "start_ps": float(profile.times[0]),
                "step_ps": step,
                "ber": [float(b) for b in profile.ber],
                "monotone_clamped": profile.monotone_clamped,
            }
            delay_stats[cid][key] = {"label": layout.taps[dt_id].label,
                                     "branch_hops": layout.taps[dt_id].branch_hops,
                                     **_delay_stats_dict(stats)}

    delta_stats: dict[str, dict[str, dict]] = {}
    for cond in stressed:
        cid = str(cond.config_state_id)
        delta_stats[cid] = {}
        for dme_id, dt_id in plan.schedule:
            base = stats_cache[(baseline.config_state_id, dme_id, dt_id)]
            stress = stats_cache[(cond.config_state_id, dme_id, dt_id)]
            d = compute_delta(base, stress, step)
            delta_stats[cid][_series_key(dme_id, dt_id)] = {
                "label": layout.taps[dt_id].label,
                "branch_hops": layout.taps[dt_id].branch_hops,
                "delta_mu_ps": d.delta_mu, "delta_mu_rel": d.delta_mu_rel,
                "delta_sigma_ps": d.delta_sigma,
                "delta_mu_steps": d.delta_mu_steps,
                "delta_sigma_steps": d.delta_sigma_steps,
            }

    region_diagonal = math.dist((0, 0), (sc.width - 1, sc.height - 1)) or 1.0
    correlation: dict[str, dict | None] = {}
    heatmaps: dict[str, dict | None] = {}
    scaling: dict[str, list | None] = {}
    sweep_series: dict[str, dict] = {}
    verdicts: dict[str, dict] = {}
    for cond in conditions:
        cid = str(cond.config_state_id)
        series = None
        curve = None
        if cfg.num_sweeps >= 2:
            series = per_sweep_delay_series(store, cond.config_state_id,
                                            plan.schedule, layout.taps,
                                            cfg.phase_start, step, cfg.num_sweeps)
            sweep_series[cid] = {
                _series_key(*key): [None if np.isnan(v) else float(v)
                                    for v in series.medians[i]]
                for i, key in enumerate(series.keys)}
            try:
                curve = spatial_correlation_curve(
                    series, region_diagonal, bin_width=sc.analysis.bin_width_clb,
                    fit_r_min=sc.analysis.fit_r_min, fallback_r=sc.analysis.fallback_r)
            except TooFewPairs:
                curve = None
        correlation[cid] = _curve_dict(curve)
        hm = None
        if curve is not None:
            try:
                hm = correlation_heatmap(series)
            except ZeroVarianceReference:
                hm = None
        heatmaps[cid] = _heatmap_dict(hm)
        pts = None
        if curve is not None:
            usable = len({e.key_i for e in curve.entries}
                         | {e.key_j for e in curve.entries})
            sizes = [n for n in sc.analysis.subset_sizes if 2 <= n <= usable]
            if sizes:
                pts = [{"n": p.n, "mean_r": p.mean_r,
                        "ci_low": p.ci_low, "ci_high": p.ci_high}
                       for p in dme_count_scaling(series, sizes, seed=plan.seed,
                                                  reps=sc.analysis.bootstrap_reps)]
        scaling[cid] = pts
        if cond.config_state_id != baseline.config_state_id:
            deltas = {}
            for dme_id, dt_id in plan.schedule:
                base = stats_cache[(baseline.config_state_id, dme_id, dt_id)]
                stress = stats_cache[(cond.config_state_id, dme_id, dt_id)]
                deltas[(dme_id, dt_id)] = compute_delta(base, stress, step)
            # a handful of noise-driven pairs cannot support a decay estimate
            decay = (curve.decay.length
                     if curve is not None
                     and len(curve.entries) >= sc.analysis.min_decay_pairs
                     else None)
            evidence = build_evidence(deltas, step, decay)
            verdicts[cid] = _verdict_dict(
                classify_mechanism(evidence, sc.analysis.thresholds()))

    report = {
        "tool": {"name": "timingdiag", "version": __version__},
        "seed": plan.seed,
        "scenario": sc.echo(),
        "instrument_limits": INSTRUMENT_LIMITS,
        "phase_grid": {"start_ps": cfg.phase_start, "step_ps": step,
                       "count": cfg.phase_count},
        "settle": {"cycles_per_window": cfg.settle_cycles,
                   "total_cycles": cfg.settle_cycles * plan.total_windows},
        "conditions": [{"config_state_id": c.config_state_id, "name": c.name,
                        "kind": c.kind} for c in conditions],
        "layout": {
            "taps": [{"dt_id": t.id, "label": t.label, "path_id": t.path_id,
                      "x": t.position[0], "y": t.position[1],
                      "depth_segments": t.segment_index + 1,
                      "branch_hops": t.branch_hops}
                     for t in (layout.taps[i] for i in sorted(layout.taps))],
            "dmes": [{"dme_id": d.id, "x": d.position[0], "y": d.position[1],
                      "assigned_taps": list(d.assigned_taps)}
                     for d in (layout.dmes[i] for i in sorted(layout.dmes))],
        },
        "windows": {"planned": plan.total_windows, "recorded": len(store)},
        "delay_stats": delay_stats,
        "delta_stats": delta_stats,
        "profiles": profiles,
        "per_sweep_medians": sweep_series,
        "correlation": correlation,
        "heatmaps": heatmaps,
        "scaling": scaling,
        "verdicts": verdicts,
    }
    return _plain(report)


def _plain(obj):
    """Convert numpy scalars and tuples to JSON-stable primitives."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def report_json_text(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
