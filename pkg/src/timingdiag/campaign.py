"""Campaign planning, execution and record storage.

A campaign is the cross product conditions x (monitor, tap) schedule x sweeps
x phases. Execution draws one degradation realization per (condition, sweep)
shared by every monitor in that sweep, which is what makes globally correlated
mechanisms measurable as cross-monitor correlation. Records are keyed and
serialized in canonical order, so concurrent execution cannot change outputs.
"""

from __future__ import annotations

import bisect
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .degradation import ConditionState, SweepRealization, draw_realization, effective_transition_distribution, stats_envelope
from .errors import EmptySchedule, MissingBaseline, TimingDiagError
from .fabric import DelayTap, DmePlacement, FabricGrid, RoutedPath
from .sensing import PhaseSweepConfig, run_phase_sweep

CSV_HEADER = "sweep_id,dme_id,dt_id,phase_index,config_state_id,error_count,window_cycles"

RecordKey = tuple[int, int, int, int, int]  # config, dme, dt, sweep, phase


@dataclass(frozen=True)
class MeasurementRecord:
    sweep_id: int
    dme_id: int
    dt_id: int
    phase_index: int
    config_state_id: int
    error_count: int
    window_cycles: int

    @property
    def key(self) -> RecordKey:
        return (self.config_state_id, self.dme_id, self.dt_id,
                self.sweep_id, self.phase_index)


@dataclass(frozen=True)
class CampaignPlan:
    conditions: tuple[ConditionState, ...]
    schedule: tuple[tuple[int, int], ...]  # (dme_id, dt_id) pairs
    sweep_cfg: PhaseSweepConfig
    seed: int

    @property
    def total_windows(self) -> int:
        return (len(self.conditions) * len(self.schedule)
                * self.sweep_cfg.num_sweeps * self.sweep_cfg.phase_count)


class RecordStore:
    """Immutable-after-campaign record container with canonical ordering."""

    def __init__(self, metadata: dict | None = None):
        self._records: dict[RecordKey, MeasurementRecord] = {}
        self._sorted: list[RecordKey] | None = None
        self.metadata: dict = metadata or {}

    def add(self, record: MeasurementRecord) -> None:
        key = record.key
        if key in self._records:
            raise TimingDiagError(f"duplicate record key {key}")
        self._records[key] = record
        self._sorted = None

    def __len__(self) -> int:
        return len(self._records)

    def _keys_in_order(self) -> list[RecordKey]:
        if self._sorted is None:
            self._sorted = sorted(self._records)
        return self._sorted

    def records_in_order(self) -> list[MeasurementRecord]:
        return [self._records[k] for k in self._keys_in_order()]

    def query(self, config_state_id: int | None = None, dme_id: int | None = None,
              dt_id: int | None = None, sweep_id: int | None = None,
              phase_index: int | None = None) -> list[MeasurementRecord]:
        """All records matching the given key subset, canonical order."""
        keys = self._keys_in_order()
        # Narrow by bisection over the longest fully-specified key prefix.
        wanted = (config_state_id, dme_id, dt_id, sweep_id, phase_index)
        prefix = []
        for v in wanted:
            if v is None:
                break
            prefix.append(v)
        if prefix:
            lo = bisect.bisect_left(keys, tuple(prefix))
            hi = bisect.bisect_right(keys, tuple(prefix) + (math.inf,) * (5 - len(prefix)))
            keys = keys[lo:hi]
        out = []
        for key in keys:
            cfg, dme, dt, sweep, phase = key
            if config_state_id is not None and cfg != config_state_id:
                continue
            if dme_id is not None and dme != dme_id:
                continue
            if dt_id is not None and dt != dt_id:
                continue
            if sweep_id is not None and sweep != sweep_id:
                continue
            if phase_index is not None and phase != phase_index:
                continue
            out.append(self._records[key])
        return out

    def to_csv_text(self) -> str:
        lines = [CSV_HEADER]
        for r in self.records_in_order():
            lines.append(f"{r.sweep_id},{r.dme_id},{r.dt_id},{r.phase_index},"
                         f"{r.config_state_id},{r.error_count},{r.window_cycles}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv_text(cls, text: str, metadata: dict | None = None) -> "RecordStore":
        lines = text.splitlines()
        if not lines or lines[0] != CSV_HEADER:
            raise TimingDiagError("records CSV header mismatch")
        store = cls(metadata=metadata)
        for lineno, line in enumerate(lines[1:], start=2):
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 7:
                raise TimingDiagError(f"records CSV line {lineno}: expected 7 fields")
            sweep, dme, dt, phase, cfg, err, win = (int(p) for p in parts)
            store.add(MeasurementRecord(sweep_id=sweep, dme_id=dme, dt_id=dt,
                                        phase_index=phase, config_state_id=cfg,
                                        error_count=err, window_cycles=win))
        return store


def plan_campaign(conditions: list[ConditionState] | tuple[ConditionState, ...],
                  schedule: list[tuple[int, int]] | tuple[tuple[int, int], ...],
                  sweep_cfg: PhaseSweepConfig, seed: int,
                  dmes: dict[int, DmePlacement]) -> CampaignPlan:
    """Validate and freeze a deterministic campaign plan.

    Ordering is condition-major, then sweep, then (monitor, tap), then phase.
    """
    conditions = tuple(conditions)
    schedule = tuple(schedule)
    if not conditions or conditions[0].kind != "baseline":
        raise MissingBaseline("campaign conditions must start with a baseline")
    seen = set()
    for c in conditions:
        if c.config_state_id in seen:
            raise TimingDiagError(f"duplicate config_state_id {c.config_state_id}")
        seen.add(c.config_state_id)
    if not schedule:
        raise EmptySchedule("campaign schedule is empty")
    for dme_id, dt_id in schedule:
        if dme_id not in dmes:
            raise EmptySchedule(f"schedule names unknown monitor {dme_id}")
        if dt_id not in dmes[dme_id].assigned_taps:
            raise EmptySchedule(f"tap {dt_id} not assigned to monitor {dme_id}")
    return CampaignPlan(conditions=conditions, schedule=schedule,
                        sweep_cfg=sweep_cfg, seed=int(seed))


def derive_phase_range(fabric: FabricGrid, paths: dict[str, RoutedPath],
                       taps: dict[int, DelayTap],
                       schedule: list[tuple[int, int]] | tuple[tuple[int, int], ...],
                       conditions: list[ConditionState] | tuple[ConditionState, ...],
                       step: float) -> tuple[float, float]:
    """Sweep range covering every transition under every condition.

    [min(mu) - 6*max(sigma), max(mu) + 6*max(sigma)] over the realization
    envelopes, snapped outward to the step grid.
    """
    mu_lo = math.inf
    mu_hi = -math.inf
    sigma_hi = 0.0
    for _, dt_id in schedule:
        tap = taps[dt_id]
        path = paths[tap.path_id]
        for cond in conditions:
            lo, hi, sig = stats_envelope(path, tap, cond, fabric.params)
            mu_lo = min(mu_lo, lo)
            mu_hi = max(mu_hi, hi)
            sigma_hi = max(sigma_hi, sig)
    start = math.floor((mu_lo - 6.0 * sigma_hi) / step) * step
    end = math.ceil((mu_hi + 6.0 * sigma_hi) / step) * step
    return float(start), float(end)


def _sweep_unit(plan: CampaignPlan, fabric: FabricGrid, paths: dict[str, RoutedPath],
                taps: dict[int, DelayTap], dmes: dict[int, DmePlacement],
                condition: ConditionState, realization: SweepRealization,
                dme_id: int, dt_id: int) -> list[MeasurementRecord]:
    tap = taps[dt_id]
    path = paths[tap.path_id]
    stats = effective_transition_distribution(path, tap, condition, realization,
                                              fabric.params)
    windows = run_phase_sweep(dmes[dme_id], tap, stats, plan.sweep_cfg, plan.seed,
                              condition.config_state_id, realization.sweep_id)
    return [MeasurementRecord(sweep_id=realization.sweep_id, dme_id=dme_id,
                              dt_id=dt_id, phase_index=w.phase_index,
                              config_state_id=condition.config_state_id,
                              error_count=w.error_count,
                              window_cycles=w.window_cycles)
            for w in windows]


def execute_campaign(plan: CampaignPlan, fabric: FabricGrid,
                     paths: dict[str, RoutedPath], taps: dict[int, DelayTap],
                     dmes: dict[int, DmePlacement], workers: int = 1,
                     metadata: dict | None = None) -> RecordStore:
    """Run every planned window and store records in canonical order.

    workers > 1 fans sweep units out over a thread pool; keyed substreams make
    the result identical to sequential execution.
    """
    units = []
    for condition in plan.conditions:
        for sweep_id in range(plan.sweep_cfg.num_sweeps):
            realization = draw_realization(fabric, condition, taps, plan.seed, sweep_id)
            for dme_id, dt_id in plan.schedule:
                units.append((condition, realization, dme_id, dt_id))

    store = RecordStore(metadata=metadata)
    if workers <= 1:
        for condition, realization, dme_id, dt_id in units:
            for record in _sweep_unit(plan, fabric, paths, taps, dmes,
                                      condition, realization, dme_id, dt_id):
                store.add(record)
    else:
        def job(unit):
            condition, realization, dme_id, dt_id = unit
            return _sweep_unit(plan, fabric, paths, taps, dmes,
                               condition, realization, dme_id, dt_id)

        with ThreadPoolExecutor(max_workers=workers) as pool:
            for records in pool.map(job, units):
                for record in records:
                    store.add(record)

    expected = plan.total_windows
    if len(store) != expected:
        raise TimingDiagError(f"campaign produced {len(store)} records, "
                              f"planned {expected}")
    return store
