#!/usr/bin/env python3
from __future__ import annotations

import argparse
import logging
import random

from stringkex.core import RingParams, fixed_point_spectrum, gw_step
from stringkex.protocol import ProtocolConfig
from stringkex.simulation import simulate_exchange


def trials(args: argparse.Namespace) -> int:
    cfg = ProtocolConfig.build(p=256, w=2, k=args.K, digest=args.digest)
    rng = random.Random(args.seed)
    disagreements = 0
    misses = 0
    for _ in range(args.count):
        run = simulate_exchange(cfg, rng.randint(1, 300), rng.randint(1, 300), rng)
        disagreements += not run.agreed
        misses += not run.broken
    print(f"trials={args.count} disagreements={disagreements} eve_misses={misses}")
    return int(bool(disagreements or misses))


def quasi(args: argparse.Namespace) -> int:
    params = RingParams(p=args.p, w=args.w)
    violations = 0
    for xi in range(params.p):
        row = [gw_step(params, xi, alpha) for alpha in range(params.p)]
        for alpha in range(params.p):
            after_alpha = row[alpha]
            for beta in range(params.p):
                if gw_step(params, after_alpha, beta) != gw_step(params, row[beta], alpha):
                    violations += 1
    print(f"p={params.p} w={params.w} triples={params.p ** 3} violations={violations}")
    return int(bool(violations))


def fixed(args: argparse.Namespace) -> int:
    status = 0
    for w in args.w:
        spectrum = fixed_point_spectrum(args.p, w, debug=args.debug)
        xis = [xi for xi, _ in spectrum]
        print(f"p={args.p} w={w} fixed_xi={xis[:8]}{'...' if len(xis) > 8 else ''}")
        if w % 2 == 0 and spectrum and args.p & (args.p - 1) == 0:
            status = 1
    return status


def main() -> None:
    parser = argparse.ArgumentParser()
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_trials = sub.add_parser("trials")
    p_trials.add_argument("--count", type=int, default=1000)
    p_trials.add_argument("--K", type=int, default=127)
    p_trials.add_argument("--digest", default="sha512")
    p_trials.add_argument("--seed", type=int)
    p_trials.set_defaults(func=trials)

    p_quasi = sub.add_parser("quasi")
    p_quasi.add_argument("--p", type=int, default=256)
    p_quasi.add_argument("--w", type=int, default=2)
    p_quasi.set_defaults(func=quasi)

    p_fixed = sub.add_parser("fixed")
    p_fixed.add_argument("--p", type=int, default=256)
    p_fixed.add_argument("--w", type=int, nargs="+", default=[1, 2, 3, 4, 6])
    p_fixed.add_argument("--debug", action="store_true", help="log every fixed point found")
    p_fixed.set_defaults(func=fixed)

    args = parser.parse_args()
    if getattr(args, "debug", False):
        logging.basicConfig(level=logging.DEBUG, format="%(levelname)s %(name)s %(message)s")
    raise SystemExit(args.func(args))


if __name__ == "__main__":
    main()
