"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: parameter/config problems exit 2,
numeric/degenerate failures exit 3, I/O failures exit 4.
"""

from __future__ import annotations


class GlsbiError(Exception):
    """Base class for package errors."""


class ParameterError(GlsbiError):
    """Invalid parameter or configuration value."""


class NumericError(GlsbiError):
    """Base class for numeric/degenerate failures (CLI exit 3)."""


class InsufficientSpikes(NumericError):
    """Too few spikes to form the requested statistic (< 2 inter-spike intervals)."""


class DegenerateIsi(NumericError):
    """Inter-spike intervals have zero variance; Gamma moments undefined."""


class DegenerateSample(NumericError):
    """Sample is constant (zero variance) or too small to fit."""


class SingularCovariance(NumericError):
    """Sample covariance is not invertible."""


class NoEdges(NumericError):
    """Graph has no edges but an edge-dependent sampling mode was requested."""


class TablePointFailure(NumericError):
    """A sampling-distribution grid point could not be fitted."""
