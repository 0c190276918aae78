"""Exception hierarchy.

Domain errors derive from ``ValueError`` so callers that only care about bad
numbers can catch that; channel failures derive from ``RuntimeError``.
"""

from __future__ import annotations

from typing import Any


class GaussEntError(Exception):
    """Base class for every error raised by the package."""


class InvalidInput(GaussEntError, ValueError):
    """Non-finite or out-of-range input value."""


class InvalidState(GaussEntError, ValueError):
    """Covariance matrix that is not positive definite where it must be."""


class GenerationFailure(GaussEntError, ValueError):
    """Random state generator exhausted its attempts."""


class InconsistentLocalData(GaussEntError, ValueError):
    """Local blocks and Gamma1 that no physical state can produce."""


class OutOfDomain(GaussEntError, ValueError):
    """Invariants outside the domain of a closed-form relation."""


class NumericalInconsistency(GaussEntError, ValueError):
    """A radicand or logarithm argument fell outside its valid range."""


class SingularBlock(GaussEntError, ValueError):
    """Mode-2 block cannot be inverted."""


class DegenerateParity(GaussEntError, ValueError):
    """Even and odd outcomes are (almost) equally likely."""


class PhaseUndetermined(GaussEntError, ValueError):
    """Only the magnitude of a correlation term could be recovered."""

    def __init__(self, message: str, magnitude: float | None = None):
        super().__init__(message)
        self.magnitude = magnitude


class InconsistentInput(GaussEntError, ValueError):
    """Inputs to an inversion contradict each other."""


class Unsupported(GaussEntError, ValueError):
    """Requested operation is not available for this input."""


class CutoffTooSmall(GaussEntError, ValueError):
    """Fock truncation loses more population than allowed."""

    def __init__(self, message: str, leakage: float):
        super().__init__(message)
        self.leakage = leakage


class NonzeroDisplacement(GaussEntError, ValueError):
    """State has a non-negligible first moment."""


class ChannelError(GaussEntError, RuntimeError):
    """Transport failure between the two parties."""

    def __init__(self, message: str, transcript: Any = None):
        super().__init__(message)
        self.transcript = transcript


class ProtocolViolation(GaussEntError, RuntimeError):
    """Malformed, truncated or out-of-order message."""

    def __init__(self, message: str, seq: int | None = None):
        super().__init__(message)
        self.seq = seq
