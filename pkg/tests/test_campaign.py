import pytest

from timingdiag.campaign import (CSV_HEADER, MeasurementRecord, RecordStore,
                                 execute_campaign, plan_campaign)
from timingdiag.degradation import ConditionState, PdnStressConfig
from timingdiag.errors import EmptySchedule, MissingBaseline, TimingDiagError
from timingdiag.fabric import DmePlacement
from timingdiag.scenario import build_campaign, parse_scenario
from timingdiag.sensing import PhaseSweepConfig, error_probability
from timingdiag.degradation import effective_transition_distribution, draw_realization


def _conditions():
    return [
        ConditionState(name="baseline", kind="baseline", config_state_id=0),
        ConditionState(name="stress", kind="pdn_stress", config_state_id=1,
                       pdn=PdnStressConfig(fluct_std=0.0)),
    ]


def _dmes(n_taps=8):
    return {0: DmePlacement(id=0, position=(0, 0), assigned_taps=tuple(range(n_taps)))}


def test_plan_window_product():
    cfg = PhaseSweepConfig(phase_start=0.0, phase_end=1500.0, phase_step=20.0,
                           num_sweeps=10)
    plan = plan_campaign(_conditions(), [(0, t) for t in range(8)], cfg, 1, _dmes())
    assert cfg.phase_count == 76
    assert plan.total_windows == 2 * 8 * 10 * 76


def test_plan_requires_baseline_first():
    cfg = PhaseSweepConfig(phase_start=0.0, phase_end=100.0, phase_step=20.0)
    with pytest.raises(MissingBaseline):
        plan_campaign(list(reversed(_conditions())), [(0, 0)], cfg, 1, _dmes())
    with pytest.raises(MissingBaseline):
        plan_campaign([_conditions()[1]], [(0, 0)], cfg, 1, _dmes())


def test_plan_rejects_empty_or_invalid_schedule():
    cfg = PhaseSweepConfig(phase_start=0.0, phase_end=100.0, phase_step=20.0)
    with pytest.raises(EmptySchedule):
        plan_campaign(_conditions(), [], cfg, 1, _dmes())
    with pytest.raises(EmptySchedule):
        plan_campaign(_conditions(), [(0, 99)], cfg, 1, _dmes())


SCENARIO = """
[fabric]
width = 9
height = 8
seed = 11

[taps]
placement = chain
count = 4
chain_source = 0,0
chain_dest = 8,7
chain_dme = 0,0

[sweep]
num_sweeps = 3

[condition.baseline]
kind = baseline

[condition.stress]
kind = pdn_stress
fluct_std = 0.02
"""


@pytest.fixture(scope="module")
def executed():
    sc = parse_scenario(SCENARIO)
    layout, conditions, plan = build_campaign(sc)
    store = execute_campaign(plan, layout.fabric, layout.paths, layout.taps, layout.dmes)
    return sc, layout, conditions, plan, store


def test_execute_conserves_window_count(executed):
    _, _, _, plan, store = executed
    assert len(store) == plan.total_windows


def test_records_have_constant_window_cycles(executed):
    _, _, _, plan, store = executed
    assert {r.window_cycles for r in store.records_in_order()} == {plan.sweep_cfg.window_cycles}


def test_sequential_and_concurrent_runs_identical(executed):
    _, layout, _, plan, store = executed
    concurrent = execute_campaign(plan, layout.fabric, layout.paths, layout.taps,
                                  layout.dmes, workers=4)
    assert concurrent.to_csv_text() == store.to_csv_text()


def test_repeated_runs_identical(executed):
    sc, *_ , store = executed
    layout, conditions, plan = build_campaign(sc)
    again = execute_campaign(plan, layout.fabric, layout.paths, layout.taps, layout.dmes)
    assert again.to_csv_text() == store.to_csv_text()


def test_baseline_exact_counts_match_error_probability_grid(executed):
    _, layout, conditions, plan, store = executed
    cfg = plan.sweep_cfg
    times = cfg.phase_times()
    realization = draw_realization(layout.fabric, conditions[0], layout.taps,
                                   plan.seed, sweep_id=0)
    for dme_id, dt_id in plan.schedule:
        tap = layout.taps[dt_id]
        stats = effective_transition_distribution(layout.paths[tap.path_id], tap,
                                                  conditions[0], realization,
                                                  layout.fabric.params)
        records = store.query(config_state_id=0, dme_id=dme_id, dt_id=dt_id, sweep_id=0)
        for rec, t in zip(records, times):
            expected = int(cfg.window_cycles * error_probability(stats, t) + 0.5)
            assert rec.error_count == expected


def test_query_unknown_dme_is_empty(executed):
    *_, store = executed
    assert store.query(dme_id=99) == []


def test_query_single_profile_count(executed):
    _, _, _, plan, store = executed
    records = store.query(config_state_id=0, dme_id=0, dt_id=1, sweep_id=0)
    assert len(records) == plan.sweep_cfg.phase_count
    phases = [r.phase_index for r in records]
    assert phases == sorted(phases)


def test_query_filters_consistently(executed):
    *_, store = executed
    scan = [r for r in store.records_in_order()
            if r.dt_id == 2 and r.config_state_id == 1]
    assert store.query(config_state_id=1, dt_id=2) == scan


def test_csv_round_trip_byte_identical(executed):
    *_, store = executed
    text = store.to_csv_text()
    assert text.splitlines()[0] == CSV_HEADER
    again = RecordStore.from_csv_text(text)
    assert again.to_csv_text() == text
    assert again.query(config_state_id=1, dme_id=0, dt_id=3) == \
        store.query(config_state_id=1, dme_id=0, dt_id=3)


def test_csv_rows_are_plain_integers(executed):
    *_, store = executed
    for line in store.to_csv_text().splitlines()[1:3]:
        parts = line.split(",")
        assert len(parts) == 7
        assert all(p == str(int(p)) for p in parts)
        assert line == line.strip()


def test_duplicate_record_rejected():
    store = RecordStore()
    rec = MeasurementRecord(0, 0, 0, 0, 0, 5, 10)
    store.add(rec)
    with pytest.raises(TimingDiagError):
        store.add(MeasurementRecord(0, 0, 0, 0, 0, 7, 10))


def test_csv_header_mismatch_rejected():
    with pytest.raises(TimingDiagError):
        RecordStore.from_csv_text("nope\n1,2,3,4,5,6,7\n")
