import pytest

from timingdiag.errors import (ConstraintViolation, MissingSection, TypeMismatch,
                               UnknownKey)
from timingdiag.scenario import (build_campaign, build_conditions, build_layout,
                                 parse_scenario)


def test_fabric_only_file_gets_all_defaults():
    sc = parse_scenario("[fabric]\n")
    assert (sc.width, sc.height, sc.seed) == (9, 8, 42)
    assert sc.taps.placement == "chain" and sc.taps.count == 8
    assert sc.dme_count == 32
    assert sc.sweep.phase_step_ps == 20.0
    assert sc.sweep.window_cycles == 1000
    assert sc.sweep.num_sweeps == 10
    assert sc.sweep.mode == "exact"
    assert [c.kind for c in sc.conditions] == ["baseline"]
    assert sc.analysis.theta_detect == 0.005
    assert sc.analysis.subset_sizes == [8, 16, 32]
    echo = sc.echo()
    assert echo["fabric"]["delay_min_ps"] == 100.0
    assert echo["sweep"]["phase_start_ps"] is None


def test_zero_phase_step_rejected():
    with pytest.raises(ConstraintViolation):
        parse_scenario("[fabric]\n[sweep]\nphase_step_ps = 0\n")


def test_typo_key_rejected_with_line():
    with pytest.raises(UnknownKey) as err:
        parse_scenario("[fabric]\nwidht = 9\n")
    assert "line 2" in str(err.value)
    assert "widht" in str(err.value)


def test_unknown_section_rejected():
    with pytest.raises(UnknownKey):
        parse_scenario("[fabric]\n[fabrics]\n")


def test_type_mismatch():
    with pytest.raises(TypeMismatch):
        parse_scenario("[fabric]\nwidth = wide\n")


def test_missing_fabric_section():
    with pytest.raises(MissingSection):
        parse_scenario("[sweep]\nphase_step_ps = 20\n")


def test_duplicate_section_rejected():
    with pytest.raises(ConstraintViolation):
        parse_scenario("[fabric]\nwidth = 9\n[fabric]\nheight = 8\n")


def test_key_outside_section_rejected():
    with pytest.raises(UnknownKey):
        parse_scenario("width = 9\n[fabric]\n")


def test_comments_and_blanks_ignored():
    sc = parse_scenario("""
# leading comment
[fabric]           ; trailing comment
width = 5          # inline
height = 4

[sweep]
mode = monte_carlo
""")
    assert sc.width == 5 and sc.height == 4
    assert sc.sweep.mode == "monte_carlo"


def test_condition_sections_in_order():
    sc = parse_scenario("""
[fabric]
[condition.baseline]
kind = baseline
[condition.a]
kind = pdn_stress
kappa = 0.02
[condition.b]
kind = routing_perturb
taps = L1
""")
    assert [c.name for c in sc.conditions] == ["baseline", "a", "b"]
    assert sc.conditions[1].kappa == 0.02
    assert sc.conditions[2].taps == ["L1"]


def test_bad_condition_kind():
    with pytest.raises(ConstraintViolation):
        parse_scenario("[fabric]\n[condition.x]\nkind = thermal\n")


def test_chain_layout_structure():
    sc = parse_scenario("""
[fabric]
[taps]
placement = chain
count = 8
chain_source = 0,0
chain_dest = 8,7
chain_dme = 0,0
""")
    layout = build_layout(sc)
    assert len(layout.paths) == 1
    assert len(layout.taps) == 8
    assert len(layout.dmes) == 1
    depths = [layout.taps[i].segment_index for i in sorted(layout.taps)]
    assert depths == sorted(depths)
    assert len(set(depths)) == 8
    assert layout.dmes[0].assigned_taps == tuple(range(8))
    assert [layout.taps[i].label for i in range(8)] == [f"L{i + 1}" for i in range(8)]


def test_spread_layout_structure():
    sc = parse_scenario("[fabric]\n[taps]\nplacement = spread\n[dmes]\ncount = 32\n")
    layout = build_layout(sc)
    assert len(layout.dmes) == 32
    positions = {d.position for d in layout.dmes.values()}
    assert len(positions) == 32
    for dme_id, dt_id in layout.schedule:
        assert dt_id in layout.dmes[dme_id].assigned_taps
        assert layout.taps[dt_id].branch_hops >= 1


def test_spread_too_many_monitors():
    with pytest.raises(ConstraintViolation):
        build_layout(parse_scenario("[fabric]\nwidth = 3\nheight = 3\n"
                                    "[taps]\nplacement = spread\n[dmes]\ncount = 32\n"))


def test_routing_condition_targets_named_taps():
    sc = parse_scenario("""
[fabric]
[condition.baseline]
kind = baseline
[condition.u]
kind = routing_perturb
taps = L2, L5
upsets_per_segment = 2
""")
    layout = build_layout(sc)
    conditions = build_conditions(sc, layout)
    upsets = conditions[1].upsets
    targeted = {e.tap_id for e in upsets.entries}
    assert targeted == {layout.tap_by_label("L2").id, layout.tap_by_label("L5").id}
    for tap_id in targeted:
        per_seg = [e for e in upsets.entries if e.tap_id == tap_id]
        assert len(per_seg) == 2 * layout.taps[tap_id].branch_hops


def test_unknown_tap_label_rejected():
    sc = parse_scenario("""
[fabric]
[condition.baseline]
kind = baseline
[condition.u]
kind = routing_perturb
taps = L99
""")
    layout = build_layout(sc)
    with pytest.raises(ConstraintViolation):
        build_conditions(sc, layout)


def test_build_campaign_deterministic():
    text = "[fabric]\nseed = 5\n[condition.baseline]\nkind = baseline\n"
    a = build_campaign(parse_scenario(text))
    b = build_campaign(parse_scenario(text))
    assert a[2] == b[2]
    assert a[0].taps == b[0].taps


def test_explicit_phase_range_honored():
    sc = parse_scenario("[fabric]\n[sweep]\nphase_start_ps = 0\nphase_end_ps = 4000\n")
    _, _, plan = build_campaign(sc)
    assert plan.sweep_cfg.phase_start == 0.0
    assert plan.sweep_cfg.phase_end == 4000.0


def test_half_auto_phase_range_rejected():
    with pytest.raises(ConstraintViolation):
        parse_scenario("[fabric]\n[sweep]\nphase_start_ps = 0\n")


def test_artifact_list_expansion():
    sc = parse_scenario("[fabric]\n[outputs]\nartifacts = records, svg\n")
    assert "heatmap" in sc.outputs.artifacts
    assert "records" in sc.outputs.artifacts
    with pytest.raises(ConstraintViolation):
        parse_scenario("[fabric]\n[outputs]\nartifacts = png\n")
