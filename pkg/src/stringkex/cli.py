from __future__ import annotations

import argparse
import asyncio
import logging
import os
import sys

from .attack import AttackInfeasibleError, eve
from .core import LengthMismatchError, ParameterError
from .hashstream import DIGESTS
from .protocol import (
    ALICE_SECRET_LENGTH,
    BOB_SECRET_LENGTH,
    ProtocolConfig,
    SessionStateError,
    default_entropy,
    derive_public,
    derive_shared,
    gen_generator,
    gen_secret,
)
from .simulation import format_report, simulate_exchange
from .transcript import (
    SecretExposureError,
    TranscriptFile,
    TranscriptParseError,
    encode_hex,
)
from .wire.endpoints import ConfirmationError, NegotiationError, run_initiator, run_responder
from .wire.frames import FrameError
from .wire.tap import run_tap

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_INFEASIBLE = 4
EXIT_MISMATCH = 5
# transport and handshake failures share the mismatch code
EXIT_PROTOCOL = EXIT_MISMATCH

DEFAULT_ADDRESS = "127.0.0.1:7878"
DEFAULT_TAP_ADDRESS = "127.0.0.1:7879"
DEFAULT_API_ADDRESS = "127.0.0.1:8000"

ROLE_FIELDS = {"a": ("A", "B", "sa"), "b": ("B", "A", "sb")}


class MismatchError(RuntimeError):
    """Raised when keys that must be equal differ."""


def _address(value: str) -> tuple[str, int]:
    host, sep, port = value.rpartition(":")
    if not sep or not port.isdigit():
        raise argparse.ArgumentTypeError(f"expected host:port, got {value!r}")
    return host or "127.0.0.1", int(port)


def _config(args: argparse.Namespace) -> ProtocolConfig:
    base = ProtocolConfig.from_env()
    return ProtocolConfig.build(
        p=args.p if args.p is not None else base.params.p,
        w=args.w if args.w is not None else base.params.w,
        k=args.K if args.K is not None else base.k,
        digest=args.digest or base.digest.name,
    )


def _same_context(left: TranscriptFile, right: TranscriptFile) -> None:
    if (left.cfg.params, left.cfg.k, left.cfg.digest.name) != (
        right.cfg.params,
        right.cfg.k,
        right.cfg.digest.name,
    ):
        raise ParameterError("transcript and secret file disagree on parameters")


def _secret_label(secret_file: TranscriptFile) -> str:
    labels = [label for label in ROLE_FIELDS if secret_file.get(label) is not None]
    if len(labels) != 1:
        raise TranscriptParseError("secret file must hold exactly one of 'a' or 'b'")
    return labels[0]


def _emit(document: TranscriptFile, out: str | None) -> None:
    if out:
        document.write(out)
    else:
        sys.stdout.write(document.format())


def cmd_demo(args: argparse.Namespace) -> int:
    cfg = _config(args)
    run = simulate_exchange(cfg, args.N, args.M, default_entropy(args.seed))
    sys.stdout.write(format_report(run))
    if args.out:
        run.to_file().write(args.out)
    if not (run.agreed and run.broken):
        print(
            f"internal mismatch: agreed={run.agreed} broken={run.broken}",
            file=sys.stderr,
        )
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_keygen(args: argparse.Namespace) -> int:
    source = TranscriptFile.read(args.input) if args.input else None
    cfg = source.cfg if source is not None else _config(args)
    rng = default_entropy(args.seed)
    if args.role == "generator":
        document = TranscriptFile(cfg=cfg).with_field("g", gen_generator(cfg, rng))
    elif args.role == "alice":
        document = TranscriptFile(cfg=cfg).with_field("a", gen_secret(cfg.params, args.N, rng))
    else:
        document = TranscriptFile(cfg=cfg).with_field("b", gen_secret(cfg.params, args.M, rng))
    _emit(document, args.out)
    return EXIT_OK


def cmd_pub(args: argparse.Namespace) -> int:
    transcript = TranscriptFile.read(args.input).without_secrets()
    secret_file = TranscriptFile.read(args.secret)
    _same_context(transcript, secret_file)
    label = _secret_label(secret_file)
    public_label = ROLE_FIELDS[label][0]
    public = derive_public(transcript.cfg, transcript.require("g"), secret_file.require(label))
    _emit(transcript.with_field(public_label, public), args.out)
    return EXIT_OK


def cmd_shared(args: argparse.Namespace) -> int:
    transcript = TranscriptFile.read(args.input).without_secrets()
    secret_file = TranscriptFile.read(args.secret)
    _same_context(transcript, secret_file)
    label = _secret_label(secret_file)
    _, peer_label, shared_label = ROLE_FIELDS[label]
    shared = derive_shared(transcript.cfg, transcript.require(peer_label), secret_file.require(label))
    document = transcript.with_field(shared_label, shared)
    _emit(document, args.out)
    sa, sb = document.get("sa"), document.get("sb")
    if sa is not None and sb is not None and sa != sb:
        raise MismatchError("Alice and Bob derived different shared keys")
    return EXIT_OK


def cmd_attack(args: argparse.Namespace) -> int:
    document = TranscriptFile.read(args.input)
    recovered = eve(document.cfg.params, document.public_view())
    _emit(document.with_field("eve", recovered), args.out)
    if args.out:
        print("Eve has recovered the shared secret key:")
        print(encode_hex(recovered))
    for label in ("sa", "sb"):
        honest = document.get(label)
        if honest is not None and honest != recovered:
            raise MismatchError(f"recovered key differs from {label}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    cfg = _config(args)
    host, port = args.bind
    outcome = asyncio.run(
        run_responder(
            host,
            port,
            cfg,
            secret=gen_secret(cfg.params, args.M, default_entropy(args.seed)),
            on_listening=lambda bound: print(f"listening on {host}:{bound}", flush=True),
        )
    )
    print("Bob: shared secret key s = Sb")
    print(encode_hex(outcome.shared))
    print("confirm: verified")
    return EXIT_OK


def cmd_connect(args: argparse.Namespace) -> int:
    cfg = _config(args)
    host, port = args.connect
    rng = default_entropy(args.seed)
    outcome = asyncio.run(
        run_initiator(host, port, cfg, secret=gen_secret(cfg.params, args.N, rng), rng=rng)
    )
    print("Alice: shared secret key s = Sa")
    print(encode_hex(outcome.shared))
    print("confirm: verified")
    return EXIT_OK


def cmd_tap(args: argparse.Namespace) -> int:
    listen_host, listen_port = args.listen
    upstream_host, upstream_port = args.upstream
    reports = asyncio.run(
        run_tap(
            listen_host,
            listen_port,
            upstream_host,
            upstream_port,
            sessions=args.sessions,
            on_listening=lambda bound: print(f"tapping on {listen_host}:{bound}", flush=True),
        )
    )
    status = EXIT_OK
    for report in reports:
        print(report.format())
        if not report.complete:
            status = max(status, EXIT_INFEASIBLE)
        elif not report.verified:
            status = EXIT_MISMATCH
    return status


def cmd_api(args: argparse.Namespace) -> int:
    import uvicorn

    host, port = args.bind
    uvicorn.run("stringkex.api.main:app", host=host, port=port)
    return EXIT_OK


def _add_params(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", type=int, help="alphabet size, even (env STRINGKEX_P)")
    parser.add_argument("--w", type=int, help="multiplier, even (env STRINGKEX_W)")
    parser.add_argument("--K", type=int, help="public string length (env STRINGKEX_K)")
    parser.add_argument("--digest", choices=sorted(DIGESTS), help="env STRINGKEX_DIGEST")
    parser.add_argument("--seed", type=int, help="seed the entropy source for reproducible runs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stringkex",
        description="String-based key exchange and its passive break.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_demo = sub.add_parser("demo", help="simulate an exchange and the attack")
    _add_params(p_demo)
    p_demo.add_argument("--N", type=int, default=ALICE_SECRET_LENGTH)
    p_demo.add_argument("--M", type=int, default=BOB_SECRET_LENGTH)
    p_demo.add_argument("--out", help="also write the public transcript here")
    p_demo.set_defaults(func=cmd_demo)

    p_keygen = sub.add_parser("keygen", help="create a generator or a secret")
    _add_params(p_keygen)
    p_keygen.add_argument("--role", choices=["generator", "alice", "bob"], required=True)
    p_keygen.add_argument("--N", type=int, default=ALICE_SECRET_LENGTH)
    p_keygen.add_argument("--M", type=int, default=BOB_SECRET_LENGTH)
    p_keygen.add_argument("--in", dest="input", help="take parameters from this transcript")
    p_keygen.add_argument("--out")
    p_keygen.set_defaults(func=cmd_keygen)

    for name, func, help_text in (
        ("pub", cmd_pub, "add a public key to a transcript"),
        ("shared", cmd_shared, "add a shared key to a transcript"),
    ):
        p_step = sub.add_parser(name, help=help_text)
        p_step.add_argument("--in", dest="input", required=True)
        p_step.add_argument("--secret", required=True, help="file holding 'a' or 'b'")
        p_step.add_argument("--out")
        p_step.set_defaults(func=func)

    p_attack = sub.add_parser("attack", help="recover the shared key from g, A, B")
    p_attack.add_argument("--in", dest="input", required=True)
    p_attack.add_argument("--out")
    p_attack.set_defaults(func=cmd_attack)

    p_serve = sub.add_parser("serve", help="run the responder (Bob)")
    _add_params(p_serve)
    p_serve.add_argument("--M", type=int, default=BOB_SECRET_LENGTH)
    p_serve.add_argument("--bind", type=_address, default=_address(DEFAULT_ADDRESS))
    p_serve.set_defaults(func=cmd_serve)

    p_connect = sub.add_parser("connect", help="run the initiator (Alice)")
    _add_params(p_connect)
    p_connect.add_argument("--N", type=int, default=ALICE_SECRET_LENGTH)
    p_connect.add_argument("--connect", type=_address, default=_address(DEFAULT_ADDRESS))
    p_connect.set_defaults(func=cmd_connect)

    p_tap = sub.add_parser("tap", help="relay passively and recover the key")
    p_tap.add_argument("--listen", type=_address, default=_address(DEFAULT_TAP_ADDRESS))
    p_tap.add_argument("--upstream", type=_address, default=_address(DEFAULT_ADDRESS))
    p_tap.add_argument("--sessions", type=int, default=1)
    p_tap.set_defaults(func=cmd_tap)

    p_api = sub.add_parser("api", help="serve the HTTP lab API")
    p_api.add_argument("--bind", type=_address, default=_address(DEFAULT_API_ADDRESS))
    p_api.set_defaults(func=cmd_api)
    return parser


def _configure_logging(verbose: int) -> None:
    level_name = os.getenv("STRINGKEX_LOG_LEVEL", "WARNING").upper()
    level = getattr(logging, level_name, logging.WARNING)
    if verbose:
        level = logging.DEBUG if verbose > 1 else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s %(message)s")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    LOGGER.debug("command_started", extra={"cmd": args.cmd})
    try:
        return args.func(args)
    except (TranscriptParseError, FrameError, FileNotFoundError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (
        ParameterError,
        LengthMismatchError,
        SecretExposureError,
        SessionStateError,
        NegotiationError,
    ) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except AttackInfeasibleError as exc:
        print(f"attack infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (MismatchError, ConfirmationError) as exc:
        print(f"mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (OSError, asyncio.TimeoutError) as exc:
        print(f"network error: {exc or type(exc).__name__}", file=sys.stderr)
        return EXIT_PROTOCOL


if __name__ == "__main__":
    raise SystemExit(main())
