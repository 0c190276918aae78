"""Wire messages exchanged between the two parties."""

from __future__ import annotations

from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, Field, field_validator, model_validator


class Role(str, Enum):
    ALICE = "alice"
    BOB = "bob"


class MessageKind(str, Enum):
    V2_REPORT = "v2_report"
    MEAS_REQUEST = "meas_request"
    PARITY_BATCH = "parity_batch"
    ACK = "ack"


# ── Payloads ─────────────────────────────────────────────

class V2Report(BaseModel):
    """Bob's estimate of his local block."""
    n: float
    m: tuple[float, float] = (0.0, 0.0)
    stderr_n: float = Field(0.0, ge=0, description="Bootstrap standard error of n")
    stderr_m: tuple[float, float] = Field((0.0, 0.0), description="Standard errors of Re m, Im m")
    shots: int = Field(..., ge=0)


class MeasRequest(BaseModel):
    """Alice asks for parity outcomes on copies [start, start + count); count 0 ends the run."""
    start: int = Field(..., ge=0)
    count: int = Field(..., ge=0)


class ParityBatch(BaseModel):
    """Bob's parity outcomes, 0 = even, 1 = odd."""
    start: int = Field(..., ge=0)
    outcomes: list[int]

    @field_validator("outcomes")
    @classmethod
    def _bits_only(cls, v: list[int]) -> list[int]:
        if any(b not in (0, 1) for b in v):
            raise ValueError("parity outcomes must be 0 or 1")
        return v


class Ack(BaseModel):
    ack_seq: int = Field(..., ge=0)


PAYLOAD_MODELS: dict[MessageKind, type[BaseModel]] = {
    MessageKind.V2_REPORT: V2Report,
    MessageKind.MEAS_REQUEST: MeasRequest,
    MessageKind.PARITY_BATCH: ParityBatch,
    MessageKind.ACK: Ack,
}


# ── Envelope ─────────────────────────────────────────────

class Message(BaseModel):
    kind: MessageKind
    sender: Role
    seq: int = Field(..., ge=0)
    payload: dict[str, Any]

    @model_validator(mode="after")
    def _payload_matches_kind(self) -> "Message":
        PAYLOAD_MODELS[self.kind].model_validate(self.payload)
        return self

    def body(self) -> BaseModel:
        return PAYLOAD_MODELS[self.kind].model_validate(self.payload)


class TranscriptEntry(BaseModel):
    direction: str = Field(..., pattern=r"^(alice->bob|bob->alice)$")
    message: Message
    timestamp: Optional[float] = None
