"""Pydantic schemas for file input: state JSON and circuit JSON."""

from __future__ import annotations

import math
from typing import Annotated, Literal, Union

from pydantic import BaseModel, Field, field_validator

from gaussent.services.fock_oracle import (
    BeamSplitter,
    GaussianCircuit,
    PhaseShifter,
    Squeezer,
    TwoModeSqueezer,
)
from gaussent.services.gaussian_core import CovarianceMatrix

ComplexPair = tuple[float, float]


def _require_finite(v):
    values = v if isinstance(v, tuple) else (v,)
    if not all(math.isfinite(x) for x in values):
        raise ValueError("must be finite")
    return v


# ── State ────────────────────────────────────────────────

class StateIn(BaseModel):
    """Two-mode covariance parameters; complex entries are [re, im] pairs."""
    n1: float = Field(..., description="⟨a1† a1⟩")
    n2: float = Field(..., description="⟨a2† a2⟩")
    m1: ComplexPair = Field((0.0, 0.0), description="⟨a1²⟩")
    m2: ComplexPair = Field((0.0, 0.0), description="⟨a2²⟩")
    ms: ComplexPair = Field((0.0, 0.0), description="⟨a1 a2†⟩")
    mc: ComplexPair = Field((0.0, 0.0), description="⟨a1 a2⟩")

    model_config = {"extra": "forbid"}

    @field_validator("n1", "n2", "m1", "m2", "ms", "mc")
    @classmethod
    def _finite(cls, v):
        return _require_finite(v)

    def to_covariance(self) -> CovarianceMatrix:
        return CovarianceMatrix(
            n1=self.n1,
            n2=self.n2,
            m1=complex(*self.m1),
            m2=complex(*self.m2),
            ms=complex(*self.ms),
            mc=complex(*self.mc),
        )


# ── Circuit ──────────────────────────────────────────────

class TwoModeSqueezeIn(BaseModel):
    kind: Literal["two_mode_squeeze"]
    r: float

    def to_gate(self) -> TwoModeSqueezer:
        return TwoModeSqueezer(self.r)


class SqueezeIn(BaseModel):
    kind: Literal["squeeze"]
    mode: Literal[1, 2]
    s: float
    theta: float = 0.0

    def to_gate(self) -> Squeezer:
        return Squeezer(self.mode, self.s, self.theta)


class PhaseIn(BaseModel):
    kind: Literal["phase"]
    mode: Literal[1, 2]
    phi: float

    def to_gate(self) -> PhaseShifter:
        return PhaseShifter(self.mode, self.phi)


class BeamSplitterIn(BaseModel):
    kind: Literal["beam_splitter"]
    tau: float

    def to_gate(self) -> BeamSplitter:
        return BeamSplitter(self.tau)


GateIn = Annotated[
    Union[TwoModeSqueezeIn, SqueezeIn, PhaseIn, BeamSplitterIn],
    Field(discriminator="kind"),
]


class CircuitIn(BaseModel):
    nbar1: float = Field(0.0, ge=0, description="Thermal occupation of mode 1 before the gates")
    nbar2: float = Field(0.0, ge=0, description="Thermal occupation of mode 2 before the gates")
    gates: list[GateIn] = Field(default_factory=list)

    model_config = {"extra": "forbid"}

    def to_circuit(self) -> GaussianCircuit:
        return GaussianCircuit(
            gates=tuple(g.to_gate() for g in self.gates),
            nbar1=self.nbar1,
            nbar2=self.nbar2,
        )
