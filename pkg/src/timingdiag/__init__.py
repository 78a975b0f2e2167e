"""Deterministic fabric-timing simulator and degradation-diagnosis toolkit."""

__version__ = "0.1.0"

from .errors import TimingDiagError

__all__ = ["TimingDiagError", "__version__"]
