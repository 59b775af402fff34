"""Length-prefixed frames.

Frame layout::

    [4 bytes - payload length, big-endian]
    [1 byte  - frame type]
    [N bytes - payload]
"""

from __future__ import annotations

import asyncio
import hashlib
import struct
from dataclasses import dataclass
from enum import IntEnum

from ..core import ParameterError
from ..hashstream import DIGEST_WIRE_IDS, digest_by_wire_id
from ..protocol import ProtocolConfig

HEADER = struct.Struct("!IB")
HELLO = struct.Struct("!BHBHB")
MAX_PAYLOAD = 1 << 20
PROTOCOL_VERSION = 1


class FrameType(IntEnum):
    HELLO = 0x01
    GENERATOR = 0x02
    PUBKEY = 0x03
    CONFIRM = 0x04


class FrameError(ValueError):
    """Raised for malformed or oversized frames."""


@dataclass(frozen=True)
class Frame:
    type: FrameType
    payload: bytes = b""

    def encode(self) -> bytes:
        if len(self.payload) > MAX_PAYLOAD:
            raise FrameError(f"payload too large: {len(self.payload)}")
        return HEADER.pack(len(self.payload), self.type) + self.payload


def parse_header(header: bytes) -> tuple[int, FrameType]:
    if len(header) < HEADER.size:
        raise FrameError("header too short")
    length, raw_type = HEADER.unpack(header[: HEADER.size])
    if length > MAX_PAYLOAD:
        raise FrameError(f"payload too large: {length}")
    try:
        frame_type = FrameType(raw_type)
    except ValueError as exc:
        raise FrameError(f"unknown frame type 0x{raw_type:02x}") from exc
    return length, frame_type


class FrameDecoder:
    """Incremental decoder fed arbitrary chunks of a byte stream."""

    def __init__(self) -> None:
        self._buffer = bytearray()

    @property
    def pending(self) -> int:
        return len(self._buffer)

    def feed(self, data: bytes) -> list[Frame]:
        self._buffer.extend(data)
        frames: list[Frame] = []
        while len(self._buffer) >= HEADER.size:
            length, frame_type = parse_header(bytes(self._buffer[: HEADER.size]))
            end = HEADER.size + length
            if len(self._buffer) < end:
                break
            frames.append(Frame(frame_type, bytes(self._buffer[HEADER.size : end])))
            del self._buffer[:end]
        return frames


@dataclass(frozen=True)
class HelloPayload:
    version: int
    p: int
    w: int
    k: int
    digest_id: int

    @classmethod
    def for_config(cls, cfg: ProtocolConfig) -> HelloPayload:
        return cls(
            version=PROTOCOL_VERSION,
            p=cfg.params.p,
            w=cfg.params.w,
            k=cfg.k,
            digest_id=DIGEST_WIRE_IDS[cfg.digest.name],
        )

    def encode(self) -> bytes:
        try:
            return HELLO.pack(self.version, self.p, self.w, self.k, self.digest_id)
        except struct.error as exc:
            raise FrameError(f"HELLO field out of range: {exc}") from exc

    @classmethod
    def decode(cls, payload: bytes) -> HelloPayload:
        if len(payload) != HELLO.size:
            raise FrameError(f"HELLO payload must be {HELLO.size} bytes, got {len(payload)}")
        return cls(*HELLO.unpack(payload))

    def to_config(self) -> ProtocolConfig:
        """Validate the proposal; raises ParameterError for bad values."""
        if self.version != PROTOCOL_VERSION:
            raise ParameterError(f"unsupported protocol version {self.version}")
        return ProtocolConfig.build(
            p=self.p,
            w=self.w,
            k=self.k,
            digest=digest_by_wire_id(self.digest_id).name,
        )


class FrameChannel:
    """Frame I/O over an asyncio stream pair, hashing every byte moved."""

    def __init__(
        self,
        reader: asyncio.StreamReader,
        writer: asyncio.StreamWriter,
        timeout: float | None = None,
    ) -> None:
        self.reader = reader
        self.writer = writer
        self.timeout = timeout
        self.sent = hashlib.sha256()
        self.received = hashlib.sha256()

    async def send(self, frame: Frame) -> None:
        data = frame.encode()
        self.sent.update(data)
        self.writer.write(data)
        await self.writer.drain()

    async def receive(self) -> Frame:
        try:
            header = await asyncio.wait_for(
                self.reader.readexactly(HEADER.size), self.timeout
            )
            length, frame_type = parse_header(header)
            payload = b""
            if length:
                payload = await asyncio.wait_for(
                    self.reader.readexactly(length), self.timeout
                )
        except asyncio.IncompleteReadError as exc:
            raise FrameError("connection closed mid-frame") from exc
        self.received.update(header + payload)
        return Frame(frame_type, payload)

    async def discard(self) -> None:
        """Read and drop input until the peer closes or the timeout expires."""
        try:
            await asyncio.wait_for(self.reader.read(), self.timeout)
        except (asyncio.TimeoutError, ConnectionError):
            pass

    async def close(self) -> None:
        self.writer.close()
        try:
            await self.writer.wait_closed()
        except (ConnectionError, OSError):
            pass
