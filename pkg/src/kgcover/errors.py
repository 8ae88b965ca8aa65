"""Typed errors shared across the package.

Every validation failure carries a structured ``witness`` (the offending
identifiers or vectors) so callers can surface it in reports.
"""

from __future__ import annotations


class KgError(Exception):
    """Base class for all library errors."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


# --- skeleton / k-graph validation ---------------------------------------

class SkeletonError(KgError):
    pass


class MissingSquare(KgError):
    pass


class NotBijective(KgError):
    pass


class RangeSourceBroken(KgError):
    pass


class HexagonViolation(KgError):
    pass


class HasSource(KgError):
    pass


class WrongRank(KgError):
    pass


# --- path algebra ---------------------------------------------------------

class NotComposable(KgError):
    pass


class DegreeOutOfRange(KgError):
    pass


# --- coverings and cocycles -----------------------------------------------

class NotSurjective(KgError):
    pass


class LocalInjectivityFail(KgError):
    pass


class SquareIncompatible(KgError):
    pass


class DegreeBroken(KgError):
    pass


class SquareRelationFail(KgError):
    pass


class BadPermutation(KgError):
    pass


class AnchorMismatch(KgError):
    pass


class ZeroRowOrColumn(KgError):
    pass


class ComponentMismatch(KgError):
    pass


class ChainBreak(KgError):
    pass


class InternalConstructionError(KgError):
    pass


# --- integer algebra --------------------------------------------------------

class NotAComplex(KgError):
    pass


class NotWellDefined(KgError):
    pass


class SingularBasis(KgError):
    pass


# --- K-theory ---------------------------------------------------------------

class TorsionHypothesisFail(KgError):
    pass


class RankTooHigh(KgError):
    pass


class UnknownFamily(KgError):
    pass


# --- parsing ----------------------------------------------------------------

class ParseError(KgError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, col {column}: {message}")
        self.line = line
        self.column = column
