from __future__ import annotations

from dataclasses import dataclass, field

from .attack import eve
from .core import SymbolString
from .protocol import (
    ALICE_SECRET_LENGTH,
    BOB_SECRET_LENGTH,
    Entropy,
    KeyExchangeSession,
    ProtocolConfig,
    Transcript,
    default_entropy,
)
from .transcript import TranscriptFile, encode_hex


@dataclass(frozen=True)
class ExchangeRun:
    """Everything one simulated exchange produced, secrets included."""

    cfg: ProtocolConfig
    generator: SymbolString
    alice_secret: SymbolString = field(repr=False)
    bob_secret: SymbolString = field(repr=False)
    alice_public: SymbolString
    bob_public: SymbolString
    alice_shared: SymbolString
    bob_shared: SymbolString
    eve_shared: SymbolString

    @property
    def agreed(self) -> bool:
        return self.alice_shared == self.bob_shared

    @property
    def broken(self) -> bool:
        return self.eve_shared == self.alice_shared

    @property
    def transcript(self) -> Transcript:
        return Transcript(self.generator, self.alice_public, self.bob_public)

    def to_file(self, include_secrets: bool = False) -> TranscriptFile:
        fields = {
            "g": self.generator,
            "A": self.alice_public,
            "B": self.bob_public,
            "sa": self.alice_shared,
            "sb": self.bob_shared,
            "eve": self.eve_shared,
        }
        if include_secrets:
            fields |= {"a": self.alice_secret, "b": self.bob_secret}
        return TranscriptFile(cfg=self.cfg, fields=fields)


def simulate_exchange(
    cfg: ProtocolConfig,
    n: int | None = ALICE_SECRET_LENGTH,
    m: int | None = BOB_SECRET_LENGTH,
    rng: Entropy | None = None,
) -> ExchangeRun:
    """Run both parties in-process, then let the eavesdropper attack the transcript."""
    rng = rng or default_entropy()
    alice = KeyExchangeSession(cfg, rng=rng, secret_length=n)
    bob = KeyExchangeSession(cfg, rng=rng, secret_length=m)
    g = alice.agree_generator()
    bob.agree_generator(g)
    alice_public = alice.publish()
    bob_public = bob.publish()
    alice.receive_peer(bob_public)
    bob.receive_peer(alice_public)
    return ExchangeRun(
        cfg=cfg,
        generator=g,
        alice_secret=alice.secret,
        bob_secret=bob.secret,
        alice_public=alice_public,
        bob_public=bob_public,
        alice_shared=alice.derive(),
        bob_shared=bob.derive(),
        eve_shared=eve(cfg.params, Transcript(g, alice_public, bob_public)),
    )


def format_report(run: ExchangeRun) -> str:
    params = run.cfg.params
    header = (
        f"Simulation results: p={params.p} w={params.w} K={run.cfg.k} "
        f"digest={run.cfg.digest.name} N={len(run.alice_secret)} M={len(run.bob_secret)}"
    )
    sections = [
        ("Generator: public g", run.generator),
        ("Alice: secret key a", run.alice_secret),
        ("Bob: secret key b", run.bob_secret),
        ("Alice: public key A", run.alice_public),
        ("Bob: public key B", run.bob_public),
        ("Alice: shared secret key s = Sa", run.alice_shared),
        ("Bob: shared secret key s = Sb", run.bob_shared),
        ("Eve has recovered the shared secret key:", run.eve_shared),
    ]
    blocks = [header] + [f"{title}\n{encode_hex(value)}" for title, value in sections]
    return "\n\n".join(blocks) + "\n"
