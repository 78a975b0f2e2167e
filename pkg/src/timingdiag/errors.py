"""Exception types raised across the toolkit.

Class names state the violated condition directly; every exception derives
from TimingDiagError so callers can catch the whole family at once.
"""

from __future__ import annotations


class TimingDiagError(Exception):
    """Base class for all toolkit errors."""


# --- fabric construction ---

class ZeroDimension(TimingDiagError):
    """Grid width or height is zero."""


class OutOfGrid(TimingDiagError):
    """A coordinate lies outside the fabric grid."""


class NodeNotOnPath(TimingDiagError):
    """Requested tap node is not a node of the routed path."""


# --- degradation models ---

class SingularCovariance(TimingDiagError):
    """Spatial covariance factorization failed even after ridging."""


class FunctionalPathViolation(TimingDiagError):
    """An upset entry addresses a functional-path segment."""


# --- phase-sweep sensing ---

class EmptyPhaseRange(TimingDiagError):
    """Phase sweep configuration yields no sample points."""


class TapNotAssigned(TimingDiagError):
    """Selected tap is not in the monitor's assigned chain."""


# --- campaign control ---

class MissingBaseline(TimingDiagError):
    """Campaign conditions do not start with a baseline condition."""


class EmptySchedule(TimingDiagError):
    """Campaign has no (monitor, tap) pairs to measure."""


# --- diagnosis ---

class GapInPhaseGrid(TimingDiagError):
    """Records do not cover a contiguous phase-index grid."""


class EmptyInput(TimingDiagError):
    """No records matched the requested profile selection."""


class TransitionOutOfRange(TimingDiagError):
    """BER profile does not saturate at both sweep endpoints."""


class InsufficientSweeps(TimingDiagError):
    """Per-sweep analysis requires at least two sweeps."""


class ZeroVarianceSeries(TimingDiagError):
    """A delay series has no sweep-to-sweep variation."""


class TooFewPairs(TimingDiagError):
    """Not enough usable series pairs for spatial correlation."""


class SubsetTooLarge(TimingDiagError):
    """Requested subset size exceeds the number of available monitors."""


class ZeroVarianceReference(TimingDiagError):
    """Heatmap reference series has no sweep-to-sweep variation."""


# --- rendering / scenario I/O ---

class EmptyGrid(TimingDiagError):
    """Heatmap contains no instrumented cells."""


class UnknownKey(TimingDiagError):
    """Scenario text contains an unrecognized section or key."""


class TypeMismatch(TimingDiagError):
    """Scenario value cannot be parsed as the expected type."""


class MissingSection(TimingDiagError):
    """Scenario text lacks a required section."""


class ConstraintViolation(TimingDiagError):
    """Scenario value violates a documented constraint."""
