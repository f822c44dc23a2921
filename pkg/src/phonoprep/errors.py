"""Exception types raised by the public API.

Everything derives from PhonoprepError so callers (and the CLI) can
distinguish data/contract problems from genuine bugs.
"""

from __future__ import annotations


class PhonoprepError(Exception):
    """Base class for all errors raised by this package."""


# --- encoders ---

class NonAlphabeticToken(PhonoprepError):
    """Token has no alphabetic content after diacritic folding."""


class MalformedTableLine(PhonoprepError):
    """A code-table line does not parse; carries the 1-based line number."""

    def __init__(self, path: str, lineno: int, line: str):
        super().__init__(f"{path}:{lineno}: malformed table line: {line!r}")
        self.path = path
        self.lineno = lineno
        self.line = line


class EmptyTable(PhonoprepError):
    """Code-table file contained no entries."""


# --- clustering ---

class EmptyUnitList(PhonoprepError):
    """No units supplied where at least one is required."""


class SizeMismatch(PhonoprepError):
    """Cluster-size distribution does not cover the unit count."""


class InvalidFraction(PhonoprepError):
    """Cluster fraction outside (0, 1] or yielding zero clusters."""


class TooFewPoints(PhonoprepError):
    """Fewer points than requested clusters."""


# --- subword ---

class EmptyCorpus(PhonoprepError):
    """Corpus stream yielded no tokens."""


class DanglingContinuation(PhonoprepError):
    """Subword stream ended in the middle of a word."""


# --- geometry ---

class DimensionMismatch(PhonoprepError):
    """Embedding line has the wrong number of components."""

    def __init__(self, path: str, lineno: int, expected: int, got: int):
        super().__init__(
            f"{path}:{lineno}: expected {expected} components, got {got}"
        )
        self.path = path
        self.lineno = lineno
        self.expected = expected
        self.got = got


class MalformedFloat(PhonoprepError):
    """Embedding line has a component that does not parse as a float."""


class DegenerateData(PhonoprepError):
    """All points identical; no principal directions exist."""


class AllPointsRemoved(PhonoprepError):
    """Hull smoothing removed every point; threshold too aggressive."""


class ZeroDispersion(PhonoprepError):
    """Every group collapses to a single repeated point (denominator 0)."""


class InsufficientGroups(PhonoprepError):
    """Fewer groups than the density measure needs to sample."""


class EmptyEmbedding(PhonoprepError):
    """Embedding table has no vectors."""


# --- evaluate ---

class LineCountMismatch(PhonoprepError):
    """Hypothesis and reference streams have different lengths."""


# --- pipeline ---

class SeparatorCollision(PhonoprepError):
    """Separator token occurs in one of the streams being combined."""


class PipelineStageError(PhonoprepError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage
