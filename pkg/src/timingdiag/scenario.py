"""Scenario configuration: parsing, defaults, and deterministic layout.

Scenario files are line-oriented ``key = value`` text grouped into sections:

    [fabric]            grid size, master seed, delay-model parameter ranges
    [taps]              tap placement: a chain along one path, or one per monitor
    [dmes]              monitor count (spread placement)
    [sweep]             phase step, window length, sweep count, sampling mode
    [condition.NAME]    one section per campaign condition, baseline first
    [analysis]          classifier thresholds, scaling subset sizes, binning
    [outputs]           output directory and artifact selection

``#`` or ``;`` start comments. Unknown sections or keys are rejected with
their line number; every omitted key takes its documented default, and the
fully defaulted scenario is echoed into the report.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .campaign import CampaignPlan, derive_phase_range, plan_campaign
from .classify import ClassifierThresholds
from .degradation import ConditionState, PdnStressConfig, UpsetEntry, make_upset_set
from .errors import ConstraintViolation, MissingSection, TypeMismatch, UnknownKey
from .fabric import (Coord, DelayTap, DmePlacement, FabricGrid, FabricParams,
                     RoutedPath, attach_delay_tap, build_fabric, node_name,
                     route_functional_path)
from .sensing import PhaseSweepConfig

PLACEMENT_CHAIN = "chain"
PLACEMENT_SPREAD = "spread"

SVG_ARTIFACTS = ("profiles", "cdf", "delta", "correlation", "heatmap")
ALL_ARTIFACTS = ("records", "report") + SVG_ARTIFACTS


@dataclass
class TapsSpec:
    placement: str = PLACEMENT_CHAIN
    count: int = 8
    chain_source: Coord = (0, 0)
    chain_dest: Coord = (8, 7)
    chain_dme: Coord = (0, 0)


@dataclass
class SweepSpec:
    phase_step_ps: float = 20.0
    window_cycles: int = 1000
    num_sweeps: int = 10
    mode: str = "exact"
    settle_cycles: int = 8
    phase_start_ps: float | None = None  # None = auto-derived
    phase_end_ps: float | None = None


@dataclass
class ConditionSpec:
    name: str
    kind: str = "baseline"
    # supply-stress knobs
    intensity: float = 1.0
    kappa: float = 0.04
    corr_length_clb: float = 200.0
    fluct_std: float = 0.03
    mode: str = "multiplicative"
    ref_delay_ps: float = 1000.0
    # routing-upset knobs
    taps: list[str] = dc_field(default_factory=lambda: ["all"])
    upsets_per_segment: int = 2
    delta_delay_ps: list[float] = dc_field(default_factory=lambda: [20.0, 30.0, 40.0])
    local_jitter_std_ps: list[float] = dc_field(default_factory=lambda: [10.0])
    wander_scale: float = 2.0
    wander_corr_length_clb: float = 0.0


@dataclass
class AnalysisSpec:
    theta_detect: float = 0.005
    theta_uniformity: float = 0.15
    theta_sigma_steps: float = 0.5
    theta_sigma_max_steps: float = 1.0
    theta_decay_pdn: float = 4.0
    theta_decay_routing: float = 2.0
    subset_sizes: list[int] = dc_field(default_factory=lambda: [8, 16, 32])
    bootstrap_reps: int = 200
    bin_width_clb: float = 1.0
    fit_r_min: float = 0.05
    fallback_r: float = 0.5
    # below this many usable pairs the decay length is statistically
    # unresolved and the classifier treats it as unmeasured
    min_decay_pairs: int = 10

    def thresholds(self) -> ClassifierThresholds:
        return ClassifierThresholds(detect=self.theta_detect,
                                    uniformity_cv=self.theta_uniformity,
                                    sigma_steps=self.theta_sigma_steps,
                                    sigma_steps_max=self.theta_sigma_max_steps,
                                    decay_pdn=self.theta_decay_pdn,
                                    decay_routing=self.theta_decay_routing)


@dataclass
class OutputsSpec:
    directory: str = "out"
    artifacts: list[str] = dc_field(default_factory=lambda: ["records", "report"])


@dataclass
class Scenario:
    width: int = 9
    height: int = 8
    seed: int = 42
    fabric_params: FabricParams = dc_field(default_factory=FabricParams)
    taps: TapsSpec = dc_field(default_factory=TapsSpec)
    dme_count: int = 32
    sweep: SweepSpec = dc_field(default_factory=SweepSpec)
    conditions: list[ConditionSpec] = dc_field(default_factory=lambda: [ConditionSpec("baseline")])
    analysis: AnalysisSpec = dc_field(default_factory=AnalysisSpec)
    outputs: OutputsSpec = dc_field(default_factory=OutputsSpec)

    def echo(self) -> dict:
        """Fully defaulted scenario as a plain dict for the report."""
        fp = self.fabric_params
        return {
            "fabric": {
                "width": self.width, "height": self.height, "seed": self.seed,
                "delay_min_ps": fp.delay_min_ps, "delay_max_ps": fp.delay_max_ps,
                "jitter_min_ps": fp.jitter_min_ps, "jitter_max_ps": fp.jitter_max_ps,
                "branch_delay_min_ps": fp.branch_delay_min_ps,
                "branch_delay_max_ps": fp.branch_delay_max_ps,
                "branch_jitter_min_ps": fp.branch_jitter_min_ps,
                "branch_jitter_max_ps": fp.branch_jitter_max_ps,
                "launch_delay_ps": fp.launch_delay_ps,
                "launch_jitter_ps": fp.launch_jitter_ps,
            },
            "taps": {
                "placement": self.taps.placement, "count": self.taps.count,
                "chain_source": list(self.taps.chain_source),
                "chain_dest": list(self.taps.chain_dest),
                "chain_dme": list(self.taps.chain_dme),
            },
            "dmes": {"count": self.dme_count},
            "sweep": {
                "phase_step_ps": self.sweep.phase_step_ps,
                "window_cycles": self.sweep.window_cycles,
                "num_sweeps": self.sweep.num_sweeps,
                "mode": self.sweep.mode,
                "settle_cycles": self.sweep.settle_cycles,
                "phase_start_ps": self.sweep.phase_start_ps,
                "phase_end_ps": self.sweep.phase_end_ps,
            },
            "conditions": [{
                "name": c.name, "kind": c.kind,
                **({"intensity": c.intensity, "kappa": c.kappa,
                    "corr_length_clb": c.corr_length_clb, "fluct_std": c.fluct_std,
                    "mode": c.mode, "ref_delay_ps": c.ref_delay_ps}
                   if c.kind in ("pdn_stress", "combined") else {}),
                **({"taps": list(c.taps), "upsets_per_segment": c.upsets_per_segment,
                    "delta_delay_ps": list(c.delta_delay_ps),
                    "local_jitter_std_ps": list(c.local_jitter_std_ps),
                    "wander_scale": c.wander_scale,
                    "wander_corr_length_clb": c.wander_corr_length_clb}
                   if c.kind in ("routing_perturb", "combined") else {}),
            } for c in self.conditions],
            "analysis": {
                "theta_detect": self.analysis.theta_detect,
                "theta_uniformity": self.analysis.theta_uniformity,
                "theta_sigma_steps": self.analysis.theta_sigma_steps,
                "theta_sigma_max_steps": self.analysis.theta_sigma_max_steps,
                "theta_decay_pdn": self.analysis.theta_decay_pdn,
                "theta_decay_routing": self.analysis.theta_decay_routing,
                "subset_sizes": list(self.analysis.subset_sizes),
                "bootstrap_reps": self.analysis.bootstrap_reps,
                "bin_width_clb": self.analysis.bin_width_clb,
                "fit_r_min": self.analysis.fit_r_min,
                "fallback_r": self.analysis.fallback_r,
                "min_decay_pairs": self.analysis.min_decay_pairs,
            },
            "outputs": {"directory": self.outputs.directory,
                        "artifacts": list(self.outputs.artifacts)},
        }


# --- parsing -----------------------------------------------------------------

def _parse_int(raw: str, line: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise TypeMismatch(f"line {line}: expected integer, got {raw!r}") from None


def _parse_float(raw: str, line: int) -> float:
    try:
        return float(raw)
    except ValueError:
        raise TypeMismatch(f"line {line}: expected number, got {raw!r}") from None


def _parse_coord(raw: str, line: int) -> Coord:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 2:
        raise TypeMismatch(f"line {line}: expected 'x,y' coordinate, got {raw!r}")
    return (_parse_int(parts[0], line), _parse_int(parts[1], line))


def _parse_float_list(raw: str, line: int) -> list[float]:
    return [_parse_float(p.strip(), line) for p in raw.split(",") if p.strip()]


def _parse_int_list(raw: str, line: int) -> list[int]:
    return [_parse_int(p.strip(), line) for p in raw.split(",") if p.strip()]


def _parse_str_list(raw: str) -> list[str]:
    return [p.strip() for p in raw.split(",") if p.strip()]


def _parse_auto_float(raw: str, line: int) -> float | None:
    if raw.strip().lower() == "auto":
        return None
    return _parse_float(raw, line)


_FABRIC_KEYS = {"width", "height", "seed", "delay_min_ps", "delay_max_ps",
                "jitter_min_ps", "jitter_max_ps", "branch_delay_min_ps",
                "branch_delay_max_ps", "branch_jitter_min_ps",
                "branch_jitter_max_ps", "launch_delay_ps", "launch_jitter_ps"}
_TAPS_KEYS = {"placement", "count", "chain_source", "chain_dest", "chain_dme"}
_DMES_KEYS = {"count"}
_SWEEP_KEYS = {"phase_step_ps", "window_cycles", "num_sweeps", "mode",
               "settle_cycles", "phase_start_ps", "phase_end_ps"}
_CONDITION_KEYS = {"kind", "intensity", "kappa", "corr_length_clb", "fluct_std",
                   "mode", "ref_delay_ps", "taps", "upsets_per_segment",
                   "delta_delay_ps", "local_jitter_std_ps", "wander_scale",
                   "wander_corr_length_clb"}
_ANALYSIS_KEYS = {"theta_detect", "theta_uniformity", "theta_sigma_steps",
                  "theta_sigma_max_steps", "theta_decay_pdn", "theta_decay_routing",
                  "subset_sizes", "bootstrap_reps", "bin_width_clb", "fit_r_min",
                  "fallback_r", "min_decay_pairs"}
_OUTPUTS_KEYS = {"directory", "artifacts"}


def parse_scenario(text: str) -> Scenario:
    """Parse scenario text into a fully defaulted, validated Scenario."""
    scenario = Scenario()
    scenario.conditions = []
    section: str | None = None
    condition: ConditionSpec | None = None
    seen_sections: set[str] = set()

    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name in seen_sections:
                raise ConstraintViolation(f"line {lineno}: duplicate section [{name}]")
            seen_sections.add(name)
            if name.startswith("condition."):
                cond_name = name.split(".", 1)[1]
                if not cond_name:
                    raise UnknownKey(f"line {lineno}: condition section needs a name")
                condition = ConditionSpec(name=cond_name)
                scenario.conditions.append(condition)
                section = "condition"
            elif name in ("fabric", "taps", "dmes", "sweep", "analysis", "outputs"):
                section = name
                condition = None
            else:
                raise UnknownKey(f"line {lineno}: unknown section [{name}]")
            continue
        if "=" not in line:
            raise TypeMismatch(f"line {lineno}: expected 'key = value', got {rawline!r}")
        if section is None:
            raise UnknownKey(f"line {lineno}: key outside any section")
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        _apply_key(scenario, condition, section, key, raw, lineno)

    if "fabric" not in seen_sections:
        raise MissingSection("scenario must contain a [fabric] section")
    if not scenario.conditions:
        scenario.conditions = [ConditionSpec("baseline")]
    _validate(scenario)
    return scenario


def _apply_key(sc: Scenario, cond: ConditionSpec | None, section: str,
               key: str, raw: str, line: int) -> None:
    if section == "fabric":
        if key not in _FABRIC_KEYS:
            raise UnknownKey(f"line {line}: unknown key {key!r} in [fabric]")
        if key in ("width", "height", "seed"):
            setattr(sc, key, _parse_int(raw, line))
        else:
            fp = sc.fabric_params.__dict__ | {key: _parse_float(raw, line)}
            sc.fabric_params = FabricParams(**fp)
    elif section == "taps":
        if key not in _TAPS_KEYS:
            raise UnknownKey(f"line {line}: unknown key {key!r} in [taps]")
        if key == "placement":
            if raw not in (PLACEMENT_CHAIN, PLACEMENT_SPREAD):
                raise ConstraintViolation(f"line {line}: placement must be "
                                          f"'{PLACEMENT_CHAIN}' or '{PLACEMENT_SPREAD}'")
            sc.taps.placement = raw
        elif key == "count":
            sc.taps.count = _parse_int(raw, line)
        else:
            setattr(sc.taps, key, _parse_coord(raw, line))
    elif section == "dmes":
        if key not in _DMES_KEYS:
            raise UnknownKey(f"line {line}: unknown key {key!r} in [dmes]")
        sc.dme_count = _parse_int(raw, line)
    elif section == "sweep":
        if key not in _SWEEP_KEYS:
            raise UnknownKey(f"line {line}: unknown key {key!r} in [sweep]")
        if key == "mode":
            if raw not in ("exact", "monte_carlo"):
                raise ConstraintViolation(f"line {line}: mode must be 'exact' or 'monte_carlo'")
            sc.sweep.mode = raw
        elif key in ("window_cycles", "num_sweeps", "settle_cycles"):
            setattr(sc.sweep, key, _parse_int(raw, line))
        elif key in ("phase_start_ps", "phase_end_ps"):
            setattr(sc.sweep, key, _parse_auto_float(raw, line))
        else:
            sc.sweep.phase_step_ps = _parse_float(raw, line)
    elif section == "condition":
        assert cond is not None
        if key not in _CONDITION_KEYS:
            raise UnknownKey(f"line {line}: unknown key {key!r} in [condition.{cond.name}]")
        if key == "kind":
            if raw not in ("baseline", "pdn_stress", "routing_perturb", "combined"):
                raise ConstraintViolation(f"line {line}: unknown condition kind {raw!r}")
            cond.kind = raw
        elif key == "mode":
            if raw not in ("multiplicative", "additive"):
                raise ConstraintViolation(f"line {line}: stress mode must be "
                                          "'multiplicative' or 'additive'")
            cond.mode = raw
        elif key == "taps":
            cond.taps = _parse_str_list(raw)
        elif key == "upsets_per_segment":
            cond.upsets_per_segment = _parse_int(raw, line)
        elif key in ("delta_delay_ps", "local_jitter_std_ps"):
            setattr(cond, key, _parse_float_list(raw, line))
        else:
            setattr(cond, key, _parse_float(raw, line))
    elif section == "analysis":
        if key not in _ANALYSIS_KEYS:
            raise UnknownKey(f"line {line}: unknown key {key!r} in [analysis]")
        if key == "subset_sizes":
            sc.analysis.subset_sizes = _parse_int_list(raw, line)
        elif key in ("bootstrap_reps", "min_decay_pairs"):
            setattr(sc.analysis, key, _parse_int(raw, line))
        else:
            setattr(sc.analysis, key, _parse_float(raw, line))
    elif section == "outputs":
        if key not in _OUTPUTS_KEYS:
            raise UnknownKey(f"line {line}: unknown key {key!r} in [outputs]")
        if key == "directory":
            sc.outputs.directory = raw
        else:
            arts = _parse_str_list(raw)
            expanded: list[str] = []
            for a in arts:
                if a == "svg":
                    expanded.extend(SVG_ARTIFACTS)
                elif a in ALL_ARTIFACTS:
                    expanded.append(a)
                else:
                    raise ConstraintViolation(f"line {line}: unknown artifact {a!r}")
            sc.outputs.artifacts = expanded


def _validate(sc: Scenario) -> None:
    if sc.width < 1 or sc.height < 1:
        raise ConstraintViolation("fabric width and height must be >= 1")
    fp = sc.fabric_params
    for lo, hi, what in ((fp.delay_min_ps, fp.delay_max_ps, "delay"),
                         (fp.jitter_min_ps, fp.jitter_max_ps, "jitter"),
                         (fp.branch_delay_min_ps, fp.branch_delay_max_ps, "branch delay"),
                         (fp.branch_jitter_min_ps, fp.branch_jitter_max_ps, "branch jitter")):
        if lo < 0 or hi < lo:
            raise ConstraintViolation(f"{what} range [{lo}, {hi}] is invalid")
    if fp.delay_min_ps <= 0:
        raise ConstraintViolation("segment delays must be positive")
    if sc.sweep.phase_step_ps <= 0:
        raise ConstraintViolation("phase_step_ps must be positive")
    if sc.sweep.window_cycles < 1:
        raise ConstraintViolation("window_cycles must be >= 1")
    if sc.sweep.num_sweeps < 1:
        raise ConstraintViolation("num_sweeps must be >= 1")
    if (sc.sweep.phase_start_ps is None) != (sc.sweep.phase_end_ps is None):
        raise ConstraintViolation("phase_start_ps and phase_end_ps must both be "
                                  "'auto' or both explicit")
    if sc.taps.count < 1:
        raise ConstraintViolation("taps count must be >= 1")
    if sc.taps.placement == PLACEMENT_CHAIN and sc.taps.count > 8:
        raise ConstraintViolation("a monitor chain multiplexes at most 8 taps")
    if sc.dme_count < 1:
        raise ConstraintViolation("dmes count must be >= 1")
    baselines = [c for c in sc.conditions if c.kind == "baseline"]
    if sc.conditions and not baselines and len(sc.conditions) > 0:
        # plan_campaign raises MissingBaseline; nothing to do here
        pass
    for c in sc.conditions:
        if c.kind in ("routing_perturb", "combined"):
            if c.upsets_per_segment < 1:
                raise ConstraintViolation("upsets_per_segment must be >= 1")
            if not c.delta_delay_ps or not c.local_jitter_std_ps:
                raise ConstraintViolation("upset delay/jitter menus must be non-empty")


def load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())


# --- layout ------------------------------------------------------------------

@dataclass(frozen=True)
class Layout:
    fabric: FabricGrid
    paths: dict[str, RoutedPath]
    taps: dict[int, DelayTap]
    dmes: dict[int, DmePlacement]
    schedule: tuple[tuple[int, int], ...]

    def tap_by_label(self, label: str) -> DelayTap:
        for tap in self.taps.values():
            if tap.label == label:
                return tap
        raise ConstraintViolation(f"no tap labelled {label!r}")


def _uniform_grid_positions(width: int, height: int, count: int) -> list[Coord]:
    ncols = max(1, round((count * width / height) ** 0.5))
    nrows = (count + ncols - 1) // ncols
    while nrows > height and ncols < width:
        ncols += 1
        nrows = (count + ncols - 1) // ncols
    positions: list[Coord] = []
    for r in range(nrows):
        for c in range(ncols):
            if len(positions) >= count:
                break
            x = min(width - 1, round((c + 0.5) * width / ncols - 0.5))
            y = min(height - 1, round((r + 0.5) * height / nrows - 0.5))
            positions.append((x, y))
    if len(set(positions)) != count:
        raise ConstraintViolation(f"cannot place {count} monitors on a "
                                  f"{width}x{height} grid without collisions")
    return positions


def build_layout(sc: Scenario) -> Layout:
    fabric = build_fabric(sc.width, sc.height, sc.seed, sc.fabric_params)
    paths: dict[str, RoutedPath] = {}
    taps: dict[int, DelayTap] = {}
    dmes: dict[int, DmePlacement] = {}

    if sc.taps.placement == PLACEMENT_CHAIN:
        for coord in (sc.taps.chain_source, sc.taps.chain_dest, sc.taps.chain_dme):
            if not fabric.contains(coord):
                raise ConstraintViolation(f"chain coordinate {coord} outside grid")
        path = route_functional_path(fabric, sc.taps.chain_source, sc.taps.chain_dest)
        paths[path.id] = path
        t = sc.taps.count
        if t > path.sb_count - 1:
            raise ConstraintViolation(f"cannot place {t} distinct taps on a "
                                      f"{path.sb_count}-segment chain")
        indices = sorted({round((j + 1) * (path.sb_count - 1) / t) for j in range(t)})
        if len(indices) != t:
            raise ConstraintViolation("tap spacing collapsed; reduce taps count")
        for tap_id, seg_idx in enumerate(indices):
            node = node_name(path.nodes[seg_idx])
            taps[tap_id] = attach_delay_tap(fabric, path, node, sc.taps.chain_dme,
                                            tap_id=tap_id)
        dmes[0] = DmePlacement(id=0, position=sc.taps.chain_dme,
                               assigned_taps=tuple(sorted(taps)))
        schedule = tuple((0, tap_id) for tap_id in sorted(taps))
    else:
        if sc.height < 2 or sc.width < 3:
            raise ConstraintViolation("spread placement needs a grid of at least 3x2")
        positions = _uniform_grid_positions(sc.width, sc.height, sc.dme_count)
        schedule_list: list[tuple[int, int]] = []
        for i, (cx, cy) in enumerate(positions):
            ry = cy - 1 if cy >= 1 else cy + 1
            src = (max(0, cx - 4 - (i % 4)), ry)
            dst = (min(sc.width - 1, cx + 2), ry)
            path = route_functional_path(fabric, src, dst)
            paths.setdefault(path.id, path)
            tap_x = min(max(cx - (i % 3), src[0]), dst[0])
            taps[i] = attach_delay_tap(fabric, paths[path.id], node_name((tap_x, ry)),
                                       (cx, cy), tap_id=i)
            dmes[i] = DmePlacement(id=i, position=(cx, cy), assigned_taps=(i,))
            schedule_list.append((i, i))
        schedule = tuple(schedule_list)

    return Layout(fabric=fabric, paths=paths, taps=taps, dmes=dmes, schedule=schedule)


def build_conditions(sc: Scenario, layout: Layout) -> list[ConditionState]:
    conditions: list[ConditionState] = []
    for state_id, spec in enumerate(sc.conditions):
        pdn = None
        upsets = None
        if spec.kind in ("pdn_stress", "combined"):
            pdn = PdnStressConfig(intensity=spec.intensity, kappa=spec.kappa,
                                  corr_length=spec.corr_length_clb,
                                  fluct_std=spec.fluct_std, mode=spec.mode,
                                  ref_delay_ps=spec.ref_delay_ps)
        if spec.kind in ("routing_perturb", "combined"):
            if spec.taps == ["all"]:
                targets = sorted(layout.taps)
            else:
                targets = sorted(layout.tap_by_label(lbl).id for lbl in spec.taps)
            entries: list[UpsetEntry] = []
            menu_d = spec.delta_delay_ps
            menu_j = spec.local_jitter_std_ps
            for tap_id in targets:
                hops = layout.taps[tap_id].branch_hops
                for seg in range(hops):
                    for u in range(spec.upsets_per_segment):
                        k = seg * spec.upsets_per_segment + u
                        entries.append(UpsetEntry(
                            tap_id=tap_id, branch_segment_index=seg,
                            delta_delay=menu_d[k % len(menu_d)],
                            local_jitter_std=menu_j[k % len(menu_j)]))
            upsets = make_upset_set(entries, layout.taps,
                                    wander_scale=spec.wander_scale,
                                    wander_corr_length=spec.wander_corr_length_clb)
        conditions.append(ConditionState(name=spec.name, kind=spec.kind,
                                         config_state_id=state_id,
                                         pdn=pdn, upsets=upsets))
    return conditions


def build_campaign(sc: Scenario) -> tuple[Layout, list[ConditionState], CampaignPlan]:
    """Deterministically expand a scenario into an executable campaign."""
    layout = build_layout(sc)
    conditions = build_conditions(sc, layout)
    if sc.sweep.phase_start_ps is None:
        start, end = derive_phase_range(layout.fabric, layout.paths, layout.taps,
                                        layout.schedule, conditions,
                                        sc.sweep.phase_step_ps)
    else:
        start, end = sc.sweep.phase_start_ps, sc.sweep.phase_end_ps
    cfg = PhaseSweepConfig(phase_start=start, phase_end=end,
                           phase_step=sc.sweep.phase_step_ps,
                           window_cycles=sc.sweep.window_cycles,
                           settle_cycles=sc.sweep.settle_cycles,
                           num_sweeps=sc.sweep.num_sweeps,
                           mode=sc.sweep.mode)
    plan = plan_campaign(conditions, layout.schedule, cfg, sc.seed, layout.dmes)
    return layout, conditions, plan
