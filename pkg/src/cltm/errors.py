"""Exception hierarchy shared across the toolkit.

Every domain error raised by this package derives from CltmError, so the
CLI (and any embedding application) has a single catch point. Programming
mistakes (wrong argument types, impossible parameter combinations) raise
the usual ValueError/TypeError instead.
"""


class CltmError(Exception):
    """Base class for all domain errors raised by this package."""


class RecordParseError(CltmError):
    """A record file row is malformed. Carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class GridError(CltmError):
    """Record set does not assemble into a complete, seed-aligned grid."""


class InsufficientCurveError(CltmError):
    """Learning curve has fewer than the minimum distinct sample counts."""


class FitDivergedError(CltmError):
    """Curve fit residual norm exceeds half the observed performance range."""


class NoDynamicRegionError(CltmError):
    """No dynamic training interval exists for the fitted curve."""


class InvalidDenominatorError(CltmError):
    """A self-gain is non-positive, so the matrix row is undefined."""

    def __init__(self, language: str, self_gain: float):
        self.language = language
        self.self_gain = self_gain
        super().__init__(
            f"self-gain for {language!r} is {self_gain!r}; matrix row requires a "
            "strictly positive denominator"
        )


class ZeroMatrixError(CltmError):
    """Frobenius norm of the matrix is zero (asymmetry undefined)."""


class ZeroRowError(CltmError):
    """A matrix row is all-zero (row cosine undefined)."""


class NoValidSeedsError(CltmError):
    """Every seed of some row has a non-positive self-gain."""


class NoPositivesError(CltmError):
    """No speaker contributes two or more utterances."""


class NoNegativesError(CltmError):
    """No same-gender cross-speaker utterance pair exists."""


class ZeroNormError(CltmError):
    """Pooled embedding vector has (numerically) zero norm."""
