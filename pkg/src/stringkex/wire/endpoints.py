from __future__ import annotations

import asyncio
import hmac
import logging
import os
from collections.abc import Callable
from dataclasses import dataclass

from ..core import SymbolString
from ..protocol import Entropy, KeyExchangeSession, ProtocolConfig
from .frames import Frame, FrameChannel, FrameError, FrameType, HelloPayload

LOGGER = logging.getLogger(__name__)

ROLE_INITIATOR = 0x01
ROLE_RESPONDER = 0x02
ROLE_NAMES = {ROLE_INITIATOR: "initiator", ROLE_RESPONDER: "responder"}


class NegotiationError(RuntimeError):
    """Raised when the responder rejects the proposed parameters."""


class ConfirmationError(RuntimeError):
    """Raised when the peer's CONFIRM does not match the derived key."""


def io_timeout() -> float:
    return float(os.getenv("STRINGKEX_IO_TIMEOUT", "10"))


def confirm_tag(cfg: ProtocolConfig, shared: SymbolString, role: int) -> bytes:
    return cfg.digest.digest(bytes(shared) + bytes((role,)))


@dataclass(frozen=True)
class ExchangeOutcome:
    """Returned only after both CONFIRM tags matched; a mismatch raises."""

    role: str
    shared: SymbolString
    sent_digest: str
    received_digest: str


async def _expect(channel: FrameChannel, frame_type: FrameType) -> Frame:
    frame = await channel.receive()
    if frame.type is not frame_type:
        raise FrameError(f"expected {frame_type.name}, got {frame.type.name}")
    return frame


def _outcome(role: int, shared: SymbolString, channel: FrameChannel) -> ExchangeOutcome:
    return ExchangeOutcome(
        role=ROLE_NAMES[role],
        shared=shared,
        sent_digest=channel.sent.hexdigest(),
        received_digest=channel.received.hexdigest(),
    )


async def initiate(channel: FrameChannel, session: KeyExchangeSession) -> ExchangeOutcome:
    cfg = session.cfg
    g = session.generator if session.generator is not None else session.agree_generator()
    public = session.publish()
    await channel.send(Frame(FrameType.HELLO, HelloPayload.for_config(cfg).encode()))
    await channel.send(Frame(FrameType.GENERATOR, bytes(g)))
    await channel.send(Frame(FrameType.PUBKEY, bytes(public)))

    reply = await channel.receive()
    if reply.type is FrameType.HELLO:
        counter = HelloPayload.decode(reply.payload)
        raise NegotiationError(
            "responder rejected parameters, it expects "
            f"p={counter.p} w={counter.w} K={counter.k} digest_id={counter.digest_id}"
        )
    if reply.type is not FrameType.PUBKEY:
        raise FrameError(f"expected PUBKEY, got {reply.type.name}")
    session.receive_peer(tuple(reply.payload))
    shared = session.derive()

    await channel.send(Frame(FrameType.CONFIRM, confirm_tag(cfg, shared, ROLE_INITIATOR)))
    peer_confirm = await _expect(channel, FrameType.CONFIRM)
    if not hmac.compare_digest(peer_confirm.payload, confirm_tag(cfg, shared, ROLE_RESPONDER)):
        raise ConfirmationError("responder CONFIRM does not match the derived key")
    LOGGER.info("exchange_confirmed", extra={"role": "initiator", "k": cfg.k})
    return _outcome(ROLE_INITIATOR, shared, channel)


async def respond(channel: FrameChannel, session: KeyExchangeSession) -> ExchangeOutcome:
    cfg = session.cfg
    hello = await _expect(channel, FrameType.HELLO)
    proposal = HelloPayload.decode(hello.payload)
    ours = HelloPayload.for_config(cfg)
    if proposal != ours:
        await channel.send(Frame(FrameType.HELLO, ours.encode()))
        await channel.discard()
        LOGGER.warning(
            "hello_rejected",
            extra={"proposed": proposal, "expected": ours},
        )
        raise NegotiationError(f"rejected proposal {proposal}")

    generator = await _expect(channel, FrameType.GENERATOR)
    session.agree_generator(tuple(generator.payload))
    peer = await _expect(channel, FrameType.PUBKEY)
    session.receive_peer(tuple(peer.payload))
    public = session.publish()
    await channel.send(Frame(FrameType.PUBKEY, bytes(public)))
    shared = session.derive()

    peer_confirm = await _expect(channel, FrameType.CONFIRM)
    await channel.send(Frame(FrameType.CONFIRM, confirm_tag(cfg, shared, ROLE_RESPONDER)))
    if not hmac.compare_digest(peer_confirm.payload, confirm_tag(cfg, shared, ROLE_INITIATOR)):
        raise ConfirmationError("initiator CONFIRM does not match the derived key")
    LOGGER.info("exchange_confirmed", extra={"role": "responder", "k": cfg.k})
    return _outcome(ROLE_RESPONDER, shared, channel)


async def run_initiator(
    host: str,
    port: int,
    cfg: ProtocolConfig,
    *,
    secret: SymbolString | None = None,
    generator: SymbolString | None = None,
    rng: Entropy | None = None,
) -> ExchangeOutcome:
    timeout = io_timeout()
    session = KeyExchangeSession(cfg, secret=secret, rng=rng)
    if generator is not None:
        session.agree_generator(generator)
    reader, writer = await asyncio.wait_for(asyncio.open_connection(host, port), timeout)
    channel = FrameChannel(reader, writer, timeout)
    try:
        return await initiate(channel, session)
    finally:
        await channel.close()


async def run_responder(
    host: str,
    port: int,
    cfg: ProtocolConfig,
    *,
    secret: SymbolString | None = None,
    rng: Entropy | None = None,
    on_listening: Callable[[int], None] | None = None,
) -> ExchangeOutcome:
    """Accept a single session and return its outcome."""
    timeout = io_timeout()
    result: asyncio.Future[ExchangeOutcome] = asyncio.get_running_loop().create_future()

    async def handle(reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        channel = FrameChannel(reader, writer, timeout)
        try:
            outcome = await respond(channel, KeyExchangeSession(cfg, secret=secret, rng=rng))
        except Exception as exc:
            LOGGER.exception("responder_session_failed")
            if not result.done():
                result.set_exception(exc)
        else:
            if not result.done():
                result.set_result(outcome)
        finally:
            await channel.close()

    server = await asyncio.start_server(handle, host, port)
    async with server:
        bound = server.sockets[0].getsockname()[1]
        LOGGER.info("responder_listening", extra={"host": host, "port": bound})
        if on_listening is not None:
            on_listening(bound)
        return await result
