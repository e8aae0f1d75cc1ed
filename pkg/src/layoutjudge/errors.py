"""Exception types raised by layoutjudge.

Everything inherits from LayoutJudgeError so callers (and the CLI) can
distinguish data problems from programming errors with one except clause.
"""


class LayoutJudgeError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(LayoutJudgeError):
    """A text file could not be parsed. Carries a 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvariantViolation(LayoutJudgeError):
    """A structural invariant was violated (self-loop, duplicate edge, ...)."""


class DisconnectedGraph(LayoutJudgeError):
    """An operation that requires a connected graph saw a disconnected one."""


class SizeTooSmall(LayoutJudgeError):
    """A generator was asked for a structure below its minimum size."""


class DegenerateLayout(LayoutJudgeError):
    """A layout cannot be normalized or measured (zero spread or no edges)."""


class ZeroLengthEdge(LayoutJudgeError):
    """Two adjacent vertices share a position, so edge angles are undefined."""


class DimensionMismatch(LayoutJudgeError):
    """Two layouts that must match in shape or graph do not."""


class EmptyInput(LayoutJudgeError):
    """An operation received an empty collection it cannot work with."""


class TooFewGraphs(LayoutJudgeError):
    """A corpus split needs more distinct graphs than are available."""


class UnknownGroup(LayoutJudgeError):
    """An ablation referenced a feature group that does not exist."""


class VersionMismatch(LayoutJudgeError):
    """A model file was written by an incompatible format version."""


class ChecksumMismatch(LayoutJudgeError):
    """A model file is corrupt: stored and recomputed checksums differ."""


class UsageError(LayoutJudgeError):
    """Bad command-line usage (wrong flags, missing arguments)."""
