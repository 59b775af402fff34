"""Labeled lowercase-hex transcript documents.

A transcript is a sequence of ``label: value`` lines. Hex values may continue
on following lines indented by whitespace, and whitespace inside hex is
ignored on input::

    p: 256
    w: 2
    K: 127
    digest: sha512
    g:
      93444ff1380add6ae67dba5444e16cffa02679ba50e6c66cf72b18c7cf53d397
      ...
"""

from __future__ import annotations

import binascii
import re
from collections.abc import Iterable
from dataclasses import dataclass, field, replace
from pathlib import Path

from .core import ParameterError, SymbolString, as_symbols
from .protocol import ProtocolConfig, Transcript

HEX_WRAP = 64

PARAM_LABELS = ("p", "w", "K", "digest")
PUBLIC_LABELS = ("g", "A", "B")
SECRET_LABELS = ("a", "b")
RESULT_LABELS = ("sa", "sb", "eve")
KEY_LABELS = PUBLIC_LABELS + SECRET_LABELS + RESULT_LABELS

_LINE = re.compile(r"^(?P<label>[A-Za-z_]+)\s*:\s*(?P<value>.*)$")


class TranscriptParseError(ValueError):
    """Raised for malformed transcript text or hex."""


class SecretExposureError(ValueError):
    """Raised when a public-view operation is handed secret material."""


def wrap_hex(text: str, width: int = HEX_WRAP) -> str:
    return "\n".join(text[i : i + width] for i in range(0, len(text), width))


def encode_hex(symbols: Iterable[int], width: int | None = HEX_WRAP) -> str:
    text = bytes(symbols).hex()
    return wrap_hex(text, width) if width else text


def decode_hex(text: str, expected_length: int | None = None) -> SymbolString:
    compact = "".join(text.split()).lower()
    if len(compact) % 2:
        raise TranscriptParseError(f"hex field has odd length {len(compact)}")
    try:
        symbols = tuple(binascii.unhexlify(compact))
    except binascii.Error as exc:
        raise TranscriptParseError(f"invalid hex: {exc}") from exc
    if expected_length is not None and len(symbols) != expected_length:
        raise TranscriptParseError(
            f"hex field decodes to {len(symbols)} symbols, expected {expected_length}"
        )
    return symbols


@dataclass(frozen=True)
class TranscriptFile:
    cfg: ProtocolConfig
    fields: dict[str, SymbolString] = field(default_factory=dict)

    def get(self, label: str) -> SymbolString | None:
        return self.fields.get(label)

    def require(self, label: str) -> SymbolString:
        value = self.fields.get(label)
        if value is None:
            raise TranscriptParseError(f"transcript has no {label!r} field")
        return value

    def with_field(self, label: str, value: SymbolString) -> TranscriptFile:
        if label not in KEY_LABELS:
            raise ValueError(f"unknown transcript label {label!r}")
        return replace(self, fields={**self.fields, label: tuple(value)})

    def without_secrets(self) -> TranscriptFile:
        return replace(
            self,
            fields={k: v for k, v in self.fields.items() if k not in SECRET_LABELS},
        )

    def public_view(self) -> Transcript:
        """The {g, A, B} view, refusing documents that carry secrets."""
        present = [label for label in SECRET_LABELS if label in self.fields]
        if present:
            raise SecretExposureError(
                f"public view refuses secret fields: {', '.join(present)}"
            )
        return Transcript(
            generator=self.require("g"),
            alice_public=self.require("A"),
            bob_public=self.require("B"),
        )

    def format(self) -> str:
        params = self.cfg.params
        lines = [
            f"p: {params.p}",
            f"w: {params.w}",
            f"K: {self.cfg.k}",
            f"digest: {self.cfg.digest.name}",
        ]
        for label in KEY_LABELS:
            value = self.fields.get(label)
            if value is None:
                continue
            lines.append(f"{label}:")
            lines.extend(f"  {chunk}" for chunk in encode_hex(value).splitlines())
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.format(), encoding="utf-8")

    @classmethod
    def parse(cls, text: str) -> TranscriptFile:
        raw: dict[str, list[str]] = {}
        current: str | None = None
        for number, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            if line[0].isspace():
                if current is None:
                    raise TranscriptParseError(f"line {number}: continuation without a label")
                raw[current].append(line)
                continue
            match = _LINE.match(line)
            if match is None:
                raise TranscriptParseError(f"line {number}: expected 'label: value'")
            label = match["label"]
            if label not in PARAM_LABELS and label not in KEY_LABELS:
                raise TranscriptParseError(f"line {number}: unknown label {label!r}")
            if label in raw:
                raise TranscriptParseError(f"line {number}: duplicate label {label!r}")
            raw[label] = [match["value"]]
            current = label

        missing = [label for label in PARAM_LABELS if label not in raw]
        if missing:
            raise TranscriptParseError(f"missing parameter fields: {', '.join(missing)}")
        try:
            p, w, k = (int("".join(raw[label]).strip()) for label in ("p", "w", "K"))
        except ValueError as exc:
            raise TranscriptParseError(f"non-integer parameter: {exc}") from exc
        # RingParams and digest validation raise ParameterError, kept distinct
        # from parse errors.
        cfg = ProtocolConfig.build(p=p, w=w, k=k, digest="".join(raw["digest"]).strip())

        fields: dict[str, SymbolString] = {}
        for label in KEY_LABELS:
            if label not in raw:
                continue
            expected = None if label in SECRET_LABELS else k
            symbols = decode_hex("".join(raw[label]), expected)
            try:
                fields[label] = as_symbols(cfg.params, symbols)
            except ParameterError as exc:
                raise ParameterError(f"field {label!r}: {exc}") from exc
        return cls(cfg=cfg, fields=fields)

    @classmethod
    def read(cls, path: str | Path) -> TranscriptFile:
        return cls.parse(Path(path).read_text(encoding="utf-8"))
