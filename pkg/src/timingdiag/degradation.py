"""Parametric degradation mechanisms.

Two mechanisms perturb the nominal transition statistics at a tap:

* supply-droop stress: a spatially correlated dimensionless field, redrawn
  once per sweep, feeds a clamped linear delay multiplier;
* routing upsets: cumulative per-branch-segment delay increments with added
  local jitter, plus a per-sweep wander offset at perturbed taps.

Both are quasi-static: one realization is drawn per (condition, sweep) and
held fixed for the whole sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstraintViolation, FunctionalPathViolation, SingularCovariance
from .fabric import Coord, DelayTap, FabricGrid, FabricParams, RoutedPath, TransitionStats, nominal_transition_stats
from .rng import STREAM_FIELD, STREAM_WANDER, substream

COVARIANCE_RIDGE = 1e-9


@dataclass(frozen=True)
class PdnStressConfig:
    intensity: float = 1.0        # stressor activity level, dimensionless >= 0
    kappa: float = 0.04           # delay sensitivity per unit stress
    corr_length: float = 200.0    # CLB units; droop is near-global over small regions
    fluct_std: float = 0.03       # per-sweep field amplitude
    mode: str = "multiplicative"  # or "additive"
    ref_delay_ps: float = 1000.0  # additive-mode scale constant

    def __post_init__(self) -> None:
        if self.intensity < 0 or self.kappa < 0 or self.fluct_std < 0:
            raise ConstraintViolation("stress parameters must be non-negative")
        if self.corr_length <= 0:
            raise ConstraintViolation("corr_length must be positive")
        if self.mode not in ("multiplicative", "additive"):
            raise ConstraintViolation(f"unknown stress mode {self.mode!r}")


@dataclass(frozen=True)
class UpsetEntry:
    tap_id: int
    branch_segment_index: int
    delta_delay: float      # ps
    local_jitter_std: float  # ps


@dataclass(frozen=True)
class RoutingUpsetSet:
    entries: tuple[UpsetEntry, ...]
    # Per-sweep wander of the perturbed-branch delay, as a multiple of the
    # accumulated upset jitter at each tap. Optional short spatial correlation
    # couples the wander of nearby taps.
    wander_scale: float = 2.0
    wander_corr_length: float = 0.0

    def for_tap(self, tap_id: int) -> tuple[UpsetEntry, ...]:
        return tuple(e for e in self.entries if e.tap_id == tap_id)


def make_upset_set(entries: list[UpsetEntry] | tuple[UpsetEntry, ...],
                   taps: dict[int, DelayTap],
                   wander_scale: float = 2.0,
                   wander_corr_length: float = 0.0) -> RoutingUpsetSet:
    """Validate upset entries against the taps they target.

    Branch segment indexes must address the tap's observation branch; any
    index outside it would land on the functional path, which perturbations
    must never touch.
    """
    for e in entries:
        if e.tap_id not in taps:
            raise ConstraintViolation(f"upset names unknown tap id {e.tap_id}")
        hops = taps[e.tap_id].branch_hops
        if not (0 <= e.branch_segment_index < hops):
            raise FunctionalPathViolation(
                f"upset on tap {e.tap_id} addresses segment {e.branch_segment_index}, "
                f"outside the {hops}-segment observation branch")
        if e.delta_delay < 0 or e.local_jitter_std < 0:
            raise ConstraintViolation("upset delay and jitter must be non-negative")
    if wander_scale < 0:
        raise ConstraintViolation("wander_scale must be non-negative")
    return RoutingUpsetSet(entries=tuple(entries), wander_scale=wander_scale,
                           wander_corr_length=wander_corr_length)


@dataclass(frozen=True)
class ConditionState:
    name: str
    kind: str  # baseline | pdn_stress | routing_perturb | combined
    config_state_id: int
    pdn: PdnStressConfig | None = None
    upsets: RoutingUpsetSet | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("baseline", "pdn_stress", "routing_perturb", "combined"):
            raise ConstraintViolation(f"unknown condition kind {self.kind!r}")
        if self.kind in ("pdn_stress", "combined") and self.pdn is None:
            raise ConstraintViolation(f"condition {self.name!r} needs stress parameters")
        if self.kind in ("routing_perturb", "combined") and self.upsets is None:
            raise ConstraintViolation(f"condition {self.name!r} needs an upset set")


@dataclass(frozen=True)
class SweepRealization:
    sweep_id: int
    field_sample: dict[Coord, float] = field(default_factory=dict)
    local_draws: dict[int, float] = field(default_factory=dict)


_chol_cache: dict[tuple, np.ndarray] = {}


def _field_cholesky(fabric: FabricGrid, cfg: PdnStressConfig) -> np.ndarray:
    key = (fabric.width, fabric.height, cfg.corr_length, cfg.fluct_std)
    if key in _chol_cache:
        return _chol_cache[key]
    sites = fabric.sites
    pts = np.asarray(sites, dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    cov = cfg.fluct_std ** 2 * np.exp(-dist / cfg.corr_length)
    cov[np.diag_indices_from(cov)] += COVARIANCE_RIDGE
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise SingularCovariance(
            f"covariance factorization failed (corr_length={cfg.corr_length})") from exc
    _chol_cache[key] = chol
    return chol


def sample_pdn_field(fabric: FabricGrid, cfg: PdnStressConfig, sweep_id: int,
                     seed: int, state_id: int = 0) -> dict[Coord, float]:
    """Draw one quasi-static droop field over all grid sites.

    Zero-mean Gaussian process with covariance fluct_std^2 * exp(-d/corr_length),
    d the Euclidean site distance in CLB units; deterministic in
    (seed, state_id, sweep_id).
    """
    sites = fabric.sites
    if cfg.fluct_std == 0.0:
        return {c: 0.0 for c in sites}
    chol = _field_cholesky(fabric, cfg)
    rng = substream(seed, STREAM_FIELD, state_id, sweep_id)
    z = rng.standard_normal(len(sites))
    values = chol @ z
    return {c: float(v) for c, v in zip(sites, values)}


def pdn_delay_multiplier(cfg: PdnStressConfig, field_value: float) -> float:
    """Clamped linear droop-to-delay transfer; droop never speeds a path up."""
    return max(1.0, 1.0 + cfg.kappa * (cfg.intensity + field_value))


@dataclass(frozen=True)
class UpsetSummary:
    delta_delay: float     # ps, cumulative
    added_variance: float  # ps^2


def apply_routing_upsets(tap: DelayTap, upsets: RoutingUpsetSet) -> UpsetSummary:
    """Accumulate the branch perturbation seen by one tap."""
    delta = 0.0
    variance = 0.0
    for e in upsets.for_tap(tap.id):
        if not (0 <= e.branch_segment_index < tap.branch_hops):
            raise FunctionalPathViolation(
                f"upset segment {e.branch_segment_index} outside branch of tap {tap.id}")
        delta += e.delta_delay
        variance += e.local_jitter_std ** 2
    return UpsetSummary(delta_delay=delta, added_variance=variance)


def tap_wander_std(tap: DelayTap, upsets: RoutingUpsetSet) -> float:
    """Per-sweep wander amplitude at a perturbed tap (0 for untouched taps)."""
    summary = apply_routing_upsets(tap, upsets)
    if summary.added_variance == 0.0:
        return 0.0
    return upsets.wander_scale * math.sqrt(summary.added_variance)


def draw_realization(fabric: FabricGrid, condition: ConditionState,
                     taps: dict[int, DelayTap], seed: int, sweep_id: int) -> SweepRealization:
    """Draw the stochastic state shared by all monitors for one sweep."""
    field_sample: dict[Coord, float] = {}
    local_draws: dict[int, float] = {}
    if condition.kind in ("pdn_stress", "combined"):
        field_sample = sample_pdn_field(fabric, condition.pdn, sweep_id, seed,
                                        condition.config_state_id)
    if condition.kind in ("routing_perturb", "combined"):
        upsets = condition.upsets
        perturbed = sorted({e.tap_id for e in upsets.entries})
        if perturbed:
            rng = substream(seed, STREAM_WANDER, condition.config_state_id, sweep_id)
            if upsets.wander_corr_length > 0 and len(perturbed) > 1:
                pts = np.asarray([taps[t].position for t in perturbed], dtype=float)
                diff = pts[:, None, :] - pts[None, :, :]
                dist = np.sqrt((diff ** 2).sum(axis=2))
                corr = np.exp(-dist / upsets.wander_corr_length)
                corr[np.diag_indices_from(corr)] += COVARIANCE_RIDGE
                try:
                    chol = np.linalg.cholesky(corr)
                except np.linalg.LinAlgError as exc:
                    raise SingularCovariance("wander correlation factorization failed") from exc
                g = chol @ rng.standard_normal(len(perturbed))
            else:
                g = rng.standard_normal(len(perturbed))
            for t, gv in zip(perturbed, g):
                local_draws[t] = float(tap_wander_std(taps[t], upsets) * gv)
    return SweepRealization(sweep_id=sweep_id, field_sample=field_sample,
                            local_draws=local_draws)


def effective_transition_distribution(path: RoutedPath, tap: DelayTap,
                                      condition: ConditionState,
                                      realization: SweepRealization,
                                      params: FabricParams) -> TransitionStats:
    """Transition statistics at a tap under one condition and sweep realization."""
    stats = nominal_transition_stats(path, tap, params)
    mu, sigma = stats.mu, stats.sigma

    if condition.kind in ("routing_perturb", "combined"):
        summary = apply_routing_upsets(tap, condition.upsets)
        mu += summary.delta_delay + realization.local_draws.get(tap.id, 0.0)
        sigma = math.sqrt(sigma ** 2 + summary.added_variance)

    if condition.kind in ("pdn_stress", "combined"):
        cfg = condition.pdn
        field_value = realization.field_sample.get(tap.position, 0.0)
        if cfg.mode == "multiplicative":
            m = pdn_delay_multiplier(cfg, field_value)
            mu *= m
            sigma *= m
        else:
            mu += cfg.kappa * (cfg.intensity + field_value) * cfg.ref_delay_ps

    return TransitionStats(mu=mu, sigma=sigma)


def stats_envelope(path: RoutedPath, tap: DelayTap, condition: ConditionState,
                   params: FabricParams) -> tuple[float, float, float]:
    """(mu_lo, mu_hi, sigma_hi) bounds over realizations, used to size sweeps.

    Field and wander draws are covered out to six standard deviations.
    """
    stats = nominal_transition_stats(path, tap, params)
    mu_lo = mu_hi = stats.mu
    sigma_hi = stats.sigma

    if condition.kind in ("routing_perturb", "combined"):
        summary = apply_routing_upsets(tap, condition.upsets)
        wander = tap_wander_std(tap, condition.upsets)
        mu_lo += summary.delta_delay - 6.0 * wander
        mu_hi += summary.delta_delay + 6.0 * wander
        sigma_hi = math.sqrt(sigma_hi ** 2 + summary.added_variance)

    if condition.kind in ("pdn_stress", "combined"):
        cfg = condition.pdn
        spread = 6.0 * cfg.fluct_std
        if cfg.mode == "multiplicative":
            m_lo = max(1.0, 1.0 + cfg.kappa * (cfg.intensity - spread))
            m_hi = max(1.0, 1.0 + cfg.kappa * (cfg.intensity + spread))
            mu_lo *= m_lo
            mu_hi *= m_hi
            sigma_hi *= m_hi
        else:
            lo = cfg.kappa * (cfg.intensity - spread) * cfg.ref_delay_ps
            hi = cfg.kappa * (cfg.intensity + spread) * cfg.ref_delay_ps
            mu_lo += lo
            mu_hi += hi

    return mu_lo, mu_hi, sigma_hi
