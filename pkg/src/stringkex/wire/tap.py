"""A strictly passive relay that recovers the shared key from the frames it forwards."""

from __future__ import annotations

import asyncio
import hashlib
import hmac
import logging
from collections.abc import Callable
from dataclasses import dataclass, field

from ..attack import AttackInfeasibleError, eve
from ..core import ParameterError, SymbolString
from ..protocol import ProtocolConfig, Transcript
from ..transcript import encode_hex
from .endpoints import ROLE_INITIATOR, ROLE_NAMES, ROLE_RESPONDER, confirm_tag
from .frames import Frame, FrameDecoder, FrameError, FrameType, HelloPayload

LOGGER = logging.getLogger(__name__)

CHUNK_SIZE = 65536
UPSTREAM = "c2s"
DOWNSTREAM = "s2c"


@dataclass
class TapCapture:
    """Frames observed in one relayed session, owned by the tap."""

    hello: HelloPayload | None = None
    generator: SymbolString | None = None
    alice_public: SymbolString | None = None
    bob_public: SymbolString | None = None
    confirms: dict[int, bytes] = field(default_factory=dict)
    rejected: bool = False
    parse_error: str | None = None

    def observe(self, direction: str, frame: Frame) -> None:
        if direction == UPSTREAM:
            if frame.type is FrameType.HELLO:
                self.hello = HelloPayload.decode(frame.payload)
            elif frame.type is FrameType.GENERATOR:
                self.generator = tuple(frame.payload)
            elif frame.type is FrameType.PUBKEY:
                self.alice_public = tuple(frame.payload)
            elif frame.type is FrameType.CONFIRM:
                self.confirms[ROLE_INITIATOR] = frame.payload
        elif frame.type is FrameType.HELLO:
            self.rejected = True
        elif frame.type is FrameType.PUBKEY:
            self.bob_public = tuple(frame.payload)
        elif frame.type is FrameType.CONFIRM:
            self.confirms[ROLE_RESPONDER] = frame.payload


@dataclass(frozen=True)
class TapReport:
    complete: bool
    missing: tuple[str, ...]
    recovered: SymbolString | None
    confirms: dict[str, bool]
    error: str | None
    upstream_digest: str
    downstream_digest: str

    @property
    def verified(self) -> bool:
        return (
            self.recovered is not None
            and len(self.confirms) == 2
            and all(self.confirms.values())
        )

    def format(self) -> str:
        lines = []
        if self.complete and self.recovered is not None:
            lines.append("Eve has recovered the shared secret key:")
            lines.append(encode_hex(self.recovered))
        else:
            lines.append("partial capture, no key recovered")
            if self.missing:
                lines.append(f"missing: {', '.join(self.missing)}")
        if self.error:
            lines.append(f"error: {self.error}")
        for role, ok in sorted(self.confirms.items()):
            lines.append(f"{role} confirm: {'verified' if ok else 'MISMATCH'}")
        lines.append(f"upstream sha256: {self.upstream_digest}")
        lines.append(f"downstream sha256: {self.downstream_digest}")
        return "\n".join(lines)


def analyze_capture(
    capture: TapCapture,
    digests: dict[str, str],
) -> TapReport:
    common = {
        "upstream_digest": digests[UPSTREAM],
        "downstream_digest": digests[DOWNSTREAM],
    }
    observed = {
        "hello": capture.hello,
        "generator": capture.generator,
        "alice_public": capture.alice_public,
        "bob_public": capture.bob_public,
    }
    missing = tuple(name for name, value in observed.items() if value is None)
    error = capture.parse_error
    if capture.rejected:
        error = "responder rejected the proposed parameters"
    if missing or capture.hello is None:
        return TapReport(False, missing, None, {}, error, **common)

    try:
        cfg: ProtocolConfig = capture.hello.to_config()
        transcript = Transcript(
            generator=capture.generator,
            alice_public=capture.alice_public,
            bob_public=capture.bob_public,
        )
        recovered = eve(cfg.params, transcript)
    except (AttackInfeasibleError, ParameterError, ValueError) as exc:
        return TapReport(False, (), None, {}, str(exc), **common)

    confirms = {
        ROLE_NAMES[role]: hmac.compare_digest(tag, confirm_tag(cfg, recovered, role))
        for role, tag in capture.confirms.items()
    }
    return TapReport(True, (), recovered, confirms, error, **common)


async def _pump(
    reader: asyncio.StreamReader,
    writer: asyncio.StreamWriter,
    direction: str,
    capture: TapCapture,
    seen: hashlib._Hash,
) -> None:
    decoder = FrameDecoder()
    try:
        while chunk := await reader.read(CHUNK_SIZE):
            seen.update(chunk)
            writer.write(chunk)
            await writer.drain()
            if capture.parse_error is not None:
                continue
            try:
                for frame in decoder.feed(chunk):
                    capture.observe(direction, frame)
            except FrameError as exc:
                capture.parse_error = f"{direction}: {exc}"
    except ConnectionError:
        LOGGER.debug("tap_pump_reset", extra={"direction": direction})
    finally:
        if decoder.pending and capture.parse_error is None:
            capture.parse_error = f"{direction}: {decoder.pending} trailing bytes"
        try:
            if writer.can_write_eof():
                writer.write_eof()
        except (ConnectionError, OSError):
            pass


async def _close(writer: asyncio.StreamWriter) -> None:
    writer.close()
    try:
        await writer.wait_closed()
    except (ConnectionError, OSError):
        pass


class PassiveTap:
    """Relay each accepted connection to the upstream address, unmodified."""

    def __init__(self, upstream_host: str, upstream_port: int) -> None:
        self.upstream_host = upstream_host
        self.upstream_port = upstream_port
        self.reports: asyncio.Queue[TapReport] = asyncio.Queue()
        self._server: asyncio.Server | None = None

    async def start(self, host: str, port: int) -> int:
        self._server = await asyncio.start_server(self._relay, host, port)
        bound = self._server.sockets[0].getsockname()[1]
        LOGGER.info(
            "tap_listening",
            extra={"port": bound, "upstream": f"{self.upstream_host}:{self.upstream_port}"},
        )
        return bound

    async def close(self) -> None:
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()

    async def _relay(
        self,
        client_reader: asyncio.StreamReader,
        client_writer: asyncio.StreamWriter,
    ) -> None:
        capture = TapCapture()
        hashes = {UPSTREAM: hashlib.sha256(), DOWNSTREAM: hashlib.sha256()}
        try:
            upstream_reader, upstream_writer = await asyncio.open_connection(
                self.upstream_host, self.upstream_port
            )
        except OSError as exc:
            LOGGER.error("tap_upstream_unreachable", extra={"error": str(exc)})
            await _close(client_writer)
            capture.parse_error = f"upstream unreachable: {exc}"
        else:
            await asyncio.gather(
                _pump(client_reader, upstream_writer, UPSTREAM, capture, hashes[UPSTREAM]),
                _pump(upstream_reader, client_writer, DOWNSTREAM, capture, hashes[DOWNSTREAM]),
            )
            await _close(upstream_writer)
            await _close(client_writer)

        digests = {direction: seen.hexdigest() for direction, seen in hashes.items()}
        report = analyze_capture(capture, digests)
        LOGGER.info(
            "tap_session_recovered" if report.complete else "tap_session_partial",
            extra={"missing": report.missing, "confirms": report.confirms},
        )
        await self.reports.put(report)

    async def next_report(self) -> TapReport:
        return await self.reports.get()


async def run_tap(
    listen_host: str,
    listen_port: int,
    upstream_host: str,
    upstream_port: int,
    *,
    sessions: int = 1,
    on_listening: Callable[[int], None] | None = None,
) -> list[TapReport]:
    tap = PassiveTap(upstream_host, upstream_port)
    bound = await tap.start(listen_host, listen_port)
    if on_listening is not None:
        on_listening(bound)
    try:
        return [await tap.next_report() for _ in range(sessions)]
    finally:
        await tap.close()
