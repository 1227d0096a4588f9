"""Exception types shared across the toolkit.

Every error carries a plain-language message naming the offending input or
the diagnostic that tripped; callers should not need to parse messages to
recover structured data, so anything machine-readable is exposed as an
attribute on the exception instance.
"""


class ConslawError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(ConslawError):
    """Invalid configuration value.  ``field`` names the offending entry."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class DomainError(ConslawError):
    """An argument lies outside the domain an operation supports."""


class RangeError(ConslawError):
    """A requested value is outside a table or inversion range."""


class TruncationError(ConslawError):
    """A maximizer landed in the outer margin of the search grid.

    The grid was too narrow for the realization at hand; the caller should
    re-sample on a wider domain.
    """

    def __init__(self, message, argmax_index=None, n_points=None):
        super().__init__(message)
        self.argmax_index = argmax_index
        self.n_points = n_points


class StabilityError(ConslawError):
    """A finite-difference scheme failed its stability check after refinement."""


class ConvergenceError(ConslawError):
    """An iterative or sampled estimate failed to reach its target tolerance."""


class AccuracyError(ConslawError):
    """Two independent evaluation methods disagree beyond their shared tolerance."""


class TableRangeError(RangeError):
    """A lookup left the range covered by a precomputed table."""


class SeedError(ConslawError):
    """Raised if a derived random stream cannot be constructed.

    The stream derivation used here (one named substream per logical task)
    cannot exhaust; this class exists so callers can still guard against it.
    """
