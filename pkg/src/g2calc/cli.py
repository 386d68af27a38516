"""Command line entry point for the verification campaigns."""

from __future__ import annotations

import argparse
import os
import sys

from .suites import SUITE_IDS, Campaign, all_passed, emit


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="g2calc",
        description="Numerical certification of the deformed-connection identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    verify = sub.add_parser(
        "verify",
        help="run randomised verification suites and report pass/fail counts",
    )
    verify.add_argument("--seed", type=int, default=0,
                        help="campaign seed (the G2CALC_SEED variable wins)")
    verify.add_argument("--samples", type=int, default=1000,
                        help="random trials per suite")
    verify.add_argument("--suite", action="append", dest="suites",
                        choices=list(SUITE_IDS), metavar="NAME",
                        help="run only this suite; repeatable "
                             f"(one of: {', '.join(SUITE_IDS)})")
    verify.add_argument("--format", choices=("json", "text"), default="text",
                        help="output format")
    verify.add_argument("--tol-rel", type=float, default=1e-9,
                        help="tolerance for exact identities on random data")
    verify.add_argument("--tol-identity", type=float, default=1e-8,
                        help="tolerance for identities evaluated at solutions")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    seed = args.seed
    env_seed = os.environ.get("G2CALC_SEED")
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError:
            print(f"G2CALC_SEED must be an integer, got {env_seed!r}",
                  file=sys.stderr)
            return 2
    campaign = Campaign(
        seed=seed,
        samples=args.samples,
        tol_rel=args.tol_rel,
        tol_identity=args.tol_identity,
        suites=tuple(args.suites) if args.suites else tuple(SUITE_IDS),
    )
    reports = campaign.run()
    sys.stdout.buffer.write(emit(reports, args.format, campaign))
    sys.stdout.buffer.flush()
    return 0 if all_passed(reports) else 1


if __name__ == "__main__":
    raise SystemExit(main())
