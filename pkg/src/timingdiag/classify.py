"""Mechanism classification from extracted timing statistics.

Supply-droop stress shifts medians coherently (uniform relative shift, little
extra spread, long spatial decay); routing upsets broaden the transition at
the touched locations and decorrelate quickly with distance. The verdict is a
pure function of the evidence tuple and the thresholds, both of which are
echoed for auditability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MissingBaseline
from .profiles import DeltaStats

CLASS_NONE = "NoDegradation"
CLASS_PDN = "PdnInduced"
CLASS_ROUTING = "RoutingInduced"
CLASS_MIXED = "Mixed"


@dataclass(frozen=True)
class ClassifierThresholds:
    detect: float = 0.005          # min mean |relative shift| to call degradation
    uniformity_cv: float = 0.15    # max CV of relative shifts for a coherent verdict
    sigma_steps: float = 0.5       # max median |delta sigma| (phase steps) for coherent
    sigma_steps_max: float = 1.0   # min max-tap delta sigma (steps) for localized
    decay_pdn: float = 4.0         # min decay length (CLB) for coherent
    decay_routing: float = 2.0     # max decay length (CLB) for localized


@dataclass(frozen=True)
class MechanismEvidence:
    mean_shift_rel: float          # s: mean |delta_mu_rel| over taps
    shift_uniformity_cv: float     # u: CV of delta_mu_rel
    median_sigma_steps: float      # v: median |delta_sigma| in phase steps
    max_sigma_steps: float         # signed max delta_sigma in phase steps
    decay_length: float | None     # CLB units; None when not measurable
    n_taps: int


@dataclass(frozen=True)
class MechanismVerdict:
    label: str
    evidence: MechanismEvidence
    thresholds: ClassifierThresholds


def build_evidence(deltas: dict[object, DeltaStats], phase_step: float,
                   decay_length: float | None) -> MechanismEvidence:
    if not deltas:
        raise MissingBaseline("no per-tap delta statistics available")
    rel = np.asarray([d.delta_mu_rel for d in deltas.values()])
    sig = np.asarray([d.delta_sigma for d in deltas.values()]) / phase_step
    mean_rel = float(np.mean(rel))
    std_rel = float(np.std(rel))
    if mean_rel == 0.0:
        cv = 0.0 if std_rel == 0.0 else math.inf
    else:
        cv = std_rel / abs(mean_rel)
    return MechanismEvidence(mean_shift_rel=float(np.mean(np.abs(rel))),
                             shift_uniformity_cv=cv,
                             median_sigma_steps=float(np.median(np.abs(sig))),
                             max_sigma_steps=float(np.max(sig)),
                             decay_length=decay_length,
                             n_taps=len(deltas))


def classify_mechanism(evidence: MechanismEvidence,
                       thresholds: ClassifierThresholds | None = None) -> MechanismVerdict:
    th = thresholds or ClassifierThresholds()
    ell = evidence.decay_length
    if evidence.mean_shift_rel < th.detect:
        label = CLASS_NONE
    elif (evidence.shift_uniformity_cv < th.uniformity_cv
          and evidence.median_sigma_steps < th.sigma_steps
          and ell is not None and ell > th.decay_pdn):
        label = CLASS_PDN
    elif (evidence.max_sigma_steps >= th.sigma_steps_max
          and (ell is None or ell < th.decay_routing)):
        label = CLASS_ROUTING
    else:
        label = CLASS_MIXED
    return MechanismVerdict(label=label, evidence=evidence, thresholds=th)
