"""Channels between Alice and Bob.

Three transports share one endpoint interface:

- in-process: a pair of asyncio queues;
- socket: asyncio streams on the loopback interface, each frame a 4-byte
  big-endian length followed by the JSON message;
- replay: feeds Alice the inbound half of a recorded transcript and checks
  that what she sends matches the outbound half.
"""

from __future__ import annotations

import asyncio
import logging
import struct
import time
from abc import ABC, abstractmethod
from enum import Enum

from pydantic import BaseModel, ValidationError

from gaussent.config import get_settings
from gaussent.errors import ChannelError, ProtocolViolation
from gaussent.schemas.protocol import Message, MessageKind, Role, TranscriptEntry

logger = logging.getLogger(__name__)

HEADER = struct.Struct(">I")
HEADER_SIZE = HEADER.size
MAX_FRAME_BYTES = 64 * 1024 * 1024


# ── Transcript ───────────────────────────────────────────


class ProtocolTranscript:
    """Ordered record of every message put on the wire."""

    def __init__(self, timestamps: bool | None = None):
        self.timestamps = get_settings().transcript_timestamps if timestamps is None else timestamps
        self.entries: list[TranscriptEntry] = []

    def record(self, msg: Message) -> None:
        direction = "alice->bob" if msg.sender == Role.ALICE else "bob->alice"
        self.entries.append(TranscriptEntry(
            direction=direction,
            message=msg,
            timestamp=time.time() if self.timestamps else None,
        ))

    def messages_from(self, role: Role) -> list[Message]:
        return [e.message for e in self.entries if e.message.sender == role]

    def __len__(self) -> int:
        return len(self.entries)

    def to_jsonl(self) -> str:
        return "".join(e.model_dump_json() + "\n" for e in self.entries)

    @classmethod
    def from_jsonl(cls, text: str) -> ProtocolTranscript:
        transcript = cls(timestamps=False)
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                transcript.entries.append(TranscriptEntry.model_validate_json(line))
            except ValidationError as exc:
                raise ProtocolViolation(f"Transcript line {lineno} is malformed: {exc.errors()[0]['msg']}") from exc
        return transcript


# ── Framing ──────────────────────────────────────────────


def encode_frame(msg: Message) -> bytes:
    body = msg.model_dump_json().encode("utf-8")
    return HEADER.pack(len(body)) + body


def decode_body(body: bytes, expected_seq: int | None = None) -> Message:
    try:
        return Message.model_validate_json(body)
    except ValidationError as exc:
        err = exc.errors()[0]
        field = ".".join(str(p) for p in err["loc"]) or "message"
        raise ProtocolViolation(f"Malformed message ({field}: {err['msg']})", seq=expected_seq) from exc


async def read_frame(reader: asyncio.StreamReader, expected_seq: int | None = None) -> bytes:
    try:
        header = await reader.readexactly(HEADER_SIZE)
    except asyncio.IncompleteReadError as exc:
        if not exc.partial:
            raise ChannelError("Peer closed the connection") from exc
        raise ProtocolViolation("Truncated frame header", seq=expected_seq) from exc
    (length,) = HEADER.unpack(header)
    if length > MAX_FRAME_BYTES:
        raise ProtocolViolation(f"Frame of {length} bytes is too large", seq=expected_seq)
    try:
        return await reader.readexactly(length)
    except asyncio.IncompleteReadError as exc:
        raise ProtocolViolation(
            f"Truncated frame: {len(exc.partial)} of {length} bytes", seq=expected_seq
        ) from exc


# ── Endpoints ────────────────────────────────────────────


class Endpoint(ABC):
    """One party's end of a channel; stamps and checks sequence numbers."""

    def __init__(self, role: Role, transcript: ProtocolTranscript, timeout: float | None = None):
        self.role = role
        self.transcript = transcript
        self.timeout = get_settings().channel_timeout if timeout is None else timeout
        self._next_seq = 0
        self._last_seq_in = -1

    @abstractmethod
    async def _send(self, msg: Message) -> None: ...

    @abstractmethod
    async def _recv(self) -> Message: ...

    async def close(self) -> None:
        return None

    async def send(self, kind: MessageKind, payload: BaseModel) -> Message:
        msg = Message(kind=kind, sender=self.role, seq=self._next_seq, payload=payload.model_dump(mode="json"))
        self._next_seq += 1
        await self._send(msg)
        self.transcript.record(msg)
        return msg

    async def recv(self, expect: MessageKind | None = None) -> Message:
        try:
            msg = await asyncio.wait_for(self._recv(), timeout=self.timeout)
        except asyncio.TimeoutError as exc:
            raise ChannelError(
                f"{self.role.value}: no message within {self.timeout}s", transcript=self.transcript
            ) from exc
        except ChannelError as exc:
            exc.transcript = self.transcript
            raise

        if msg.sender == self.role:
            raise ProtocolViolation(f"{self.role.value} received its own message", seq=msg.seq)
        if msg.seq <= self._last_seq_in:
            raise ProtocolViolation(
                f"Sequence number {msg.seq} after {self._last_seq_in}", seq=msg.seq
            )
        self._last_seq_in = msg.seq
        if expect is not None and msg.kind != expect:
            raise ProtocolViolation(f"Expected {expect.value}, got {msg.kind.value}", seq=msg.seq)
        return msg

    @property
    def expected_seq(self) -> int:
        return self._last_seq_in + 1


class QueueEndpoint(Endpoint):
    def __init__(self, role, transcript, inbox: asyncio.Queue, outbox: asyncio.Queue, timeout=None):
        super().__init__(role, transcript, timeout)
        self._inbox = inbox
        self._outbox = outbox

    async def _send(self, msg: Message) -> None:
        await self._outbox.put(msg)

    async def _recv(self) -> Message:
        return await self._inbox.get()


class SocketEndpoint(Endpoint):
    def __init__(self, role, transcript, reader, writer, server=None, timeout=None):
        super().__init__(role, transcript, timeout)
        self._reader = reader
        self._writer = writer
        self._server = server

    async def _send(self, msg: Message) -> None:
        try:
            self._writer.write(encode_frame(msg))
            await self._writer.drain()
        except (ConnectionError, OSError) as exc:
            raise ChannelError(f"{self.role.value}: send failed: {exc}", transcript=self.transcript) from exc

    async def _recv(self) -> Message:
        body = await read_frame(self._reader, self.expected_seq)
        return decode_body(body, self.expected_seq)

    async def close(self) -> None:
        self._writer.close()
        try:
            await self._writer.wait_closed()
        except (ConnectionError, OSError):
            pass
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()


class ReplayEndpoint(Endpoint):
    """Alice-side endpoint driven by a recorded transcript."""

    def __init__(self, recorded: ProtocolTranscript, transcript: ProtocolTranscript | None = None):
        super().__init__(Role.ALICE, transcript or ProtocolTranscript(timestamps=False))
        self._inbound = list(recorded.messages_from(Role.BOB))
        self._outbound = list(recorded.messages_from(Role.ALICE))

    async def _send(self, msg: Message) -> None:
        if not self._outbound:
            raise ProtocolViolation("Alice sent more messages than recorded", seq=msg.seq)
        expected = self._outbound.pop(0)
        if expected.model_dump() != msg.model_dump():
            raise ProtocolViolation(f"Replayed message {msg.seq} differs from the recording", seq=msg.seq)

    async def _recv(self) -> Message:
        if not self._inbound:
            raise ChannelError("Recorded transcript exhausted")
        return self._inbound.pop(0)


# ── Channel factories ────────────────────────────────────


class ChannelKind(str, Enum):
    IN_PROCESS = "in-process"
    SOCKET = "socket"


def in_process_pair(transcript: ProtocolTranscript, timeout: float | None = None) -> tuple[Endpoint, Endpoint]:
    to_bob: asyncio.Queue = asyncio.Queue()
    to_alice: asyncio.Queue = asyncio.Queue()
    alice = QueueEndpoint(Role.ALICE, transcript, inbox=to_alice, outbox=to_bob, timeout=timeout)
    bob = QueueEndpoint(Role.BOB, transcript, inbox=to_bob, outbox=to_alice, timeout=timeout)
    return alice, bob


async def socket_pair(
    transcript: ProtocolTranscript,
    host: str | None = None,
    timeout: float | None = None,
) -> tuple[Endpoint, Endpoint]:
    """Bob listens on an ephemeral loopback port, Alice connects."""
    settings = get_settings()
    host = host or settings.socket_host
    timeout = settings.channel_timeout if timeout is None else timeout
    accepted: asyncio.Future = asyncio.get_running_loop().create_future()

    async def on_connect(reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        if not accepted.done():
            accepted.set_result((reader, writer))

    try:
        server = await asyncio.start_server(on_connect, host, 0)
        port = server.sockets[0].getsockname()[1]
        a_reader, a_writer = await asyncio.wait_for(asyncio.open_connection(host, port), timeout)
        b_reader, b_writer = await asyncio.wait_for(accepted, timeout)
    except (OSError, asyncio.TimeoutError) as exc:
        raise ChannelError(f"Could not open loopback channel on {host}: {exc}", transcript=transcript) from exc

    logger.info(f"Socket channel open on {host}:{port}")
    alice = SocketEndpoint(Role.ALICE, transcript, a_reader, a_writer, timeout=timeout)
    bob = SocketEndpoint(Role.BOB, transcript, b_reader, b_writer, server=server, timeout=timeout)
    return alice, bob


async def open_channel(
    kind: ChannelKind | str,
    transcript: ProtocolTranscript,
    timeout: float | None = None,
) -> tuple[Endpoint, Endpoint]:
    kind = ChannelKind(kind)
    if kind == ChannelKind.SOCKET:
        return await socket_pair(transcript, timeout=timeout)
    return in_process_pair(transcript, timeout)
