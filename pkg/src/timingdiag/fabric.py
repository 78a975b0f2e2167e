"""Abstract routing-fabric model.

The fabric is a grid of CLB tiles, one switch-matrix node per tile. A routed
path is an L-shaped walk (horizontal leg first) whose every hop crosses one
switch matrix; delay taps hang observation-only branches off path nodes and
route them to a monitor position. All per-segment delay parameters are drawn
deterministically from the fabric seed, keyed by segment coordinates, so
rebuilding a fabric reproduces it exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import NodeNotOnPath, OutOfGrid, ZeroDimension
from .rng import STREAM_BRANCH, STREAM_SEGMENT, substream

Coord = tuple[int, int]


@dataclass(frozen=True)
class FabricParams:
    """Delay-model parameters, all overridable from the scenario file."""

    delay_min_ps: float = 100.0
    delay_max_ps: float = 140.0
    jitter_min_ps: float = 2.0
    jitter_max_ps: float = 4.0
    # Observation branches are dedicated buffered fan-out routes; they are
    # faster and quieter than functional interconnect so that tap depth, not
    # branch length, dominates the observed ordering.
    branch_delay_min_ps: float = 30.0
    branch_delay_max_ps: float = 50.0
    branch_jitter_min_ps: float = 0.5
    branch_jitter_max_ps: float = 1.5
    launch_delay_ps: float = 200.0
    launch_jitter_ps: float = 5.0


@dataclass(frozen=True)
class FabricGrid:
    width: int
    height: int
    seed: int
    params: FabricParams = field(default_factory=FabricParams)

    @property
    def sites(self) -> list[Coord]:
        return [(x, y) for y in range(self.height) for x in range(self.width)]

    def contains(self, coord: Coord) -> bool:
        x, y = coord
        return 0 <= x < self.width and 0 <= y < self.height


@dataclass(frozen=True)
class RoutingSegment:
    id: str
    from_node: str
    to_node: str
    nominal_delay: float  # ps
    jitter_std: float     # ps


@dataclass(frozen=True)
class RoutedPath:
    id: str
    source: Coord
    dest: Coord
    segments: tuple[RoutingSegment, ...]
    nodes: tuple[Coord, ...]  # switch-matrix coordinate per segment

    @property
    def sb_count(self) -> int:
        return len(self.segments)


@dataclass(frozen=True)
class DelayTap:
    id: int
    label: str
    path_id: str
    tap_node: str
    position: Coord
    segment_index: int  # index into the path segments covered by this tap
    branch: tuple[RoutingSegment, ...]

    @property
    def branch_hops(self) -> int:
        return len(self.branch)


# A monitor multiplexes one tap chain; hardware bounds the chain width.
MAX_TAPS_PER_DME = 8


@dataclass(frozen=True)
class DmePlacement:
    id: int
    position: Coord
    assigned_taps: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.assigned_taps:
            raise ValueError(f"monitor {self.id} has an empty tap chain")
        if len(self.assigned_taps) > MAX_TAPS_PER_DME:
            raise ValueError(f"monitor {self.id} chain exceeds {MAX_TAPS_PER_DME} taps")


@dataclass(frozen=True)
class TransitionStats:
    mu: float     # ps, mean transition arrival at the observation buffer
    sigma: float  # ps, accumulated-jitter standard deviation


def node_name(coord: Coord) -> str:
    return f"sb{coord[0]}_{coord[1]}"


def build_fabric(width: int, height: int, seed: int,
                 params: FabricParams | None = None) -> FabricGrid:
    if width == 0 or height == 0:
        raise ZeroDimension(f"grid dimensions must be >= 1, got {width}x{height}")
    if width < 0 or height < 0:
        raise ZeroDimension(f"grid dimensions must be >= 1, got {width}x{height}")
    return FabricGrid(width=width, height=height, seed=int(seed),
                      params=params or FabricParams())


def manhattan(a: Coord, b: Coord) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def _l_walk(source: Coord, dest: Coord) -> list[Coord]:
    """Coordinates visited by the horizontal-then-vertical L-route."""
    coords = [source]
    x, y = source
    step_x = 1 if dest[0] >= x else -1
    while x != dest[0]:
        x += step_x
        coords.append((x, y))
    step_y = 1 if dest[1] >= y else -1
    while y != dest[1]:
        y += step_y
        coords.append((x, y))
    return coords


def _draw_segment(fabric: FabricGrid, stream_tag: int, key: tuple[int, ...],
                  lo_delay: float, hi_delay: float,
                  lo_jit: float, hi_jit: float) -> tuple[float, float]:
    rng = substream(fabric.seed, stream_tag, *key)
    delay = rng.uniform(lo_delay, hi_delay)
    jitter = rng.uniform(lo_jit, hi_jit)
    return float(delay), float(jitter)


def _hop_key(a: Coord, b: Coord) -> tuple[int, ...]:
    # Undirected: a hop shares its delay draw with the reverse traversal.
    if (a[0], a[1]) <= (b[0], b[1]):
        return (1, a[0], a[1], b[0], b[1])
    return (1, b[0], b[1], a[0], a[1])


def route_functional_path(fabric: FabricGrid, source: Coord, dest: Coord) -> RoutedPath:
    """Deterministic L-shaped route; one switch-matrix segment per visited tile."""
    for coord in (source, dest):
        if not fabric.contains(coord):
            raise OutOfGrid(f"coordinate {coord} outside {fabric.width}x{fabric.height} grid")

    p = fabric.params
    coords = _l_walk(source, dest)
    segments: list[RoutingSegment] = []
    # Entry segment: local interconnect plus the planar switch matrix of the
    # source tile. Subsequent segments each cross into the next tile's matrix.
    delay, jitter = _draw_segment(fabric, STREAM_SEGMENT, (0, source[0], source[1]),
                                  p.delay_min_ps, p.delay_max_ps,
                                  p.jitter_min_ps, p.jitter_max_ps)
    segments.append(RoutingSegment(
        id=f"f-entry:{source[0]},{source[1]}",
        from_node=f"lb{source[0]}_{source[1]}",
        to_node=node_name(source),
        nominal_delay=delay, jitter_std=jitter))
    for prev, cur in zip(coords, coords[1:]):
        delay, jitter = _draw_segment(fabric, STREAM_SEGMENT, _hop_key(prev, cur),
                                      p.delay_min_ps, p.delay_max_ps,
                                      p.jitter_min_ps, p.jitter_max_ps)
        segments.append(RoutingSegment(
            id=f"f-hop:{prev[0]},{prev[1]}>{cur[0]},{cur[1]}",
            from_node=node_name(prev), to_node=node_name(cur),
            nominal_delay=delay, jitter_std=jitter))

    return RoutedPath(
        id=f"p:{source[0]},{source[1]}>{dest[0]},{dest[1]}",
        source=source, dest=dest,
        segments=tuple(segments), nodes=tuple(coords))


def attach_delay_tap(fabric: FabricGrid, path: RoutedPath, tap_node: str,
                     dme_position: Coord, tap_id: int = 0,
                     label: str | None = None) -> DelayTap:
    """Attach an observation branch from tap_node to the monitor position.

    The functional path object is never modified; the branch is a fresh
    deterministic Manhattan route drawn from the branch parameter ranges.
    """
    if not fabric.contains(dme_position):
        raise OutOfGrid(f"monitor position {dme_position} outside grid")
    seg_index = None
    for i, seg in enumerate(path.segments):
        if seg.to_node == tap_node:
            seg_index = i
            break
    if seg_index is None:
        raise NodeNotOnPath(f"{tap_node} is not a node of path {path.id}")
    tap_coord = path.nodes[seg_index]

    p = fabric.params
    branch: list[RoutingSegment] = []
    coords = _l_walk(tap_coord, dme_position)
    for prev, cur in zip(coords, coords[1:]):
        delay, jitter = _draw_segment(fabric, STREAM_BRANCH, _hop_key(prev, cur),
                                      p.branch_delay_min_ps, p.branch_delay_max_ps,
                                      p.branch_jitter_min_ps, p.branch_jitter_max_ps)
        branch.append(RoutingSegment(
            id=f"b-hop:{prev[0]},{prev[1]}>{cur[0]},{cur[1]}",
            from_node=node_name(prev), to_node=node_name(cur),
            nominal_delay=delay, jitter_std=jitter))

    return DelayTap(
        id=tap_id,
        label=label if label is not None else f"L{tap_id + 1}",
        path_id=path.id,
        tap_node=tap_node,
        position=tap_coord,
        segment_index=seg_index,
        branch=tuple(branch))


def nominal_transition_stats(path: RoutedPath, tap: DelayTap,
                             params: FabricParams) -> TransitionStats:
    """Unstressed transition statistics observed through a tap.

    Mean is launch delay plus every functional segment up to the tap node plus
    the branch; jitter contributions are independent and add in quadrature.
    """
    if tap.path_id != path.id:
        raise NodeNotOnPath(f"tap {tap.label} belongs to {tap.path_id}, not {path.id}")
    mu = params.launch_delay_ps
    var = params.launch_jitter_ps ** 2
    for seg in path.segments[: tap.segment_index + 1]:
        mu += seg.nominal_delay
        var += seg.jitter_std ** 2
    for seg in tap.branch:
        mu += seg.nominal_delay
        var += seg.jitter_std ** 2
    return TransitionStats(mu=mu, sigma=math.sqrt(var))


def functional_endpoint_stats(path: RoutedPath, params: FabricParams) -> TransitionStats:
    """Transition statistics of the path's functional destination (no tap)."""
    mu = params.launch_delay_ps
    var = params.launch_jitter_ps ** 2
    for seg in path.segments:
        mu += seg.nominal_delay
        var += seg.jitter_std ** 2
    return TransitionStats(mu=mu, sigma=math.sqrt(var))
