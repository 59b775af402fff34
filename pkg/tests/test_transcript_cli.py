from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stringkex import cli
from stringkex.protocol import ProtocolConfig, default_entropy
from stringkex.simulation import format_report, simulate_exchange
from stringkex.transcript import (
    SecretExposureError,
    TranscriptFile,
    TranscriptParseError,
    decode_hex,
    encode_hex,
    wrap_hex,
)


def test_encode_hex_wraps_lowercase() -> None:
    text = encode_hex(range(40))
    lines = text.splitlines()
    assert [len(line) for line in lines] == [64, 16]
    assert text == text.lower()
    assert encode_hex([0xAB, 0x01], width=None) == "ab01"
    assert wrap_hex("abcd", 2) == "ab\ncd"


@given(st.binary(max_size=300))
def test_hex_codec_roundtrip(data: bytes) -> None:
    assert decode_hex(encode_hex(data)) == tuple(data)


def test_decode_hex_errors() -> None:
    assert decode_hex(" AB\n 01 ") == (0xAB, 0x01)
    with pytest.raises(TranscriptParseError):
        decode_hex("abc")
    with pytest.raises(TranscriptParseError):
        decode_hex("zz")
    with pytest.raises(TranscriptParseError):
        decode_hex("ab01", expected_length=3)


def test_transcript_file_roundtrip_and_public_view(default_cfg: ProtocolConfig) -> None:
    run = simulate_exchange(default_cfg, rng=default_entropy(8))
    document = run.to_file()
    parsed = TranscriptFile.parse(document.format())
    assert parsed.fields == document.fields
    assert parsed.public_view() == run.transcript

    with_secrets = TranscriptFile.parse(run.to_file(include_secrets=True).format())
    assert with_secrets.require("a") == run.alice_secret
    with pytest.raises(SecretExposureError):
        with_secrets.public_view()


def test_transcript_parse_errors() -> None:
    with pytest.raises(TranscriptParseError):
        TranscriptFile.parse("p: 256\nw: 2\nK: 1\n")
    with pytest.raises(TranscriptParseError):
        TranscriptFile.parse("p: 256\nw: 2\nK: 1\ndigest: stub\nzeta: 00\n")
    with pytest.raises(TranscriptParseError):
        TranscriptFile.parse("p: 256\nw: 2\nK: 2\ndigest: stub\ng: 00\n")


def test_demo_report_sections(default_cfg: ProtocolConfig) -> None:
    report = format_report(simulate_exchange(default_cfg, rng=default_entropy(1)))
    titles = [
        "Generator: public g",
        "Alice: secret key a",
        "Bob: secret key b",
        "Alice: public key A",
        "Bob: public key B",
        "Alice: shared secret key s = Sa",
        "Bob: shared secret key s = Sb",
        "Eve has recovered the shared secret key:",
    ]
    positions = [report.index(title) for title in titles]
    assert positions == sorted(positions)
    assert report.startswith("Simulation results: p=256 w=2 K=127 digest=sha512 N=253 M=121")


def test_demo_is_deterministic_with_seed(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli.main(["demo", "--seed", "42"]) == cli.EXIT_OK
    first = capsys.readouterr().out
    assert cli.main(["demo", "--seed", "42"]) == cli.EXIT_OK
    second = capsys.readouterr().out
    assert first == second
    blocks = first.strip().split("\n\n")
    assert blocks[-1].split("\n", 1)[1] == blocks[-2].split("\n", 1)[1]


def test_demo_small_parameters(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli.main(["demo", "--p", "8", "--w", "2", "--K", "3", "--seed", "3"]) == cli.EXIT_OK
    assert "p=8 w=2 K=3" in capsys.readouterr().out


def test_file_pipeline_matches_demo(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    public = tmp_path / "public.txt"
    alice = tmp_path / "alice.secret"
    bob = tmp_path / "bob.secret"

    assert cli.main(["keygen", "--role", "generator", "--K", "16", "--seed", "1", "--out", str(public)]) == 0
    assert cli.main(["keygen", "--role", "alice", "--in", str(public), "--seed", "2", "--out", str(alice)]) == 0
    assert cli.main(["keygen", "--role", "bob", "--in", str(public), "--seed", "3", "--out", str(bob)]) == 0
    for secret in (alice, bob):
        assert cli.main(["pub", "--in", str(public), "--secret", str(secret), "--out", str(public)]) == 0
    for secret in (alice, bob):
        assert cli.main(["shared", "--in", str(public), "--secret", str(secret), "--out", str(public)]) == 0
    assert cli.main(["attack", "--in", str(public), "--out", str(public)]) == 0

    document = TranscriptFile.read(public)
    assert document.get("a") is None and document.get("b") is None
    assert document.require("sa") == document.require("sb") == document.require("eve")
    assert len(document.require("eve")) == 16
    assert "Eve has recovered the shared secret key:" in capsys.readouterr().out


def test_attack_refuses_secrets(tmp_path: Path, default_cfg: ProtocolConfig) -> None:
    path = tmp_path / "leaky.txt"
    simulate_exchange(default_cfg, rng=default_entropy(5)).to_file(include_secrets=True).write(path)
    assert cli.main(["attack", "--in", str(path)]) == cli.EXIT_VALIDATION


def test_truncated_hex_is_parse_error(tmp_path: Path, default_cfg: ProtocolConfig) -> None:
    text = simulate_exchange(default_cfg, rng=default_entropy(6)).to_file().format()
    lines = text.splitlines()
    g_line = lines.index("g:") + 1
    lines[g_line] = lines[g_line][:-2]
    path = tmp_path / "truncated.txt"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    assert cli.main(["attack", "--in", str(path)]) == cli.EXIT_PARSE


def test_odd_modulus_is_validation_error(tmp_path: Path) -> None:
    path = tmp_path / "odd.txt"
    path.write_text("p: 255\nw: 2\nK: 1\ndigest: stub\ng: 03\nA: 02\nB: 06\n", encoding="utf-8")
    assert cli.main(["attack", "--in", str(path)]) == cli.EXIT_VALIDATION


def test_infeasible_attack_exit_code(tmp_path: Path) -> None:
    path = tmp_path / "six.txt"
    path.write_text("p: 6\nw: 2\nK: 1\ndigest: stub\ng: 01\nA: 00\nB: 00\n", encoding="utf-8")
    assert cli.main(["attack", "--in", str(path)]) == cli.EXIT_INFEASIBLE


def test_attack_flags_mismatching_honest_key(tmp_path: Path) -> None:
    path = tmp_path / "micro.txt"
    path.write_text(
        "p: 8\nw: 2\nK: 1\ndigest: stub\ng: 03\nA: 02\nB: 06\nsa: 04\n", encoding="utf-8"
    )
    assert cli.main(["attack", "--in", str(path)]) == cli.EXIT_MISMATCH
