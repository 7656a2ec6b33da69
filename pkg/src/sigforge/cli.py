"""Command-line entry point: ``sigforge <primegen|walk|dlog|keygen|analyze>``.

Exit status is 0 on success, 2 for a configuration error and 3 when the
experiment fails at run time.
"""
from __future__ import annotations

import argparse
import json
import sys

from sigforge import harness, kernels

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat JSON file of settings; flags override it")
    p.add_argument("--seed", help="master seed, decimal or 0x-hex")
    p.add_argument("--workers", type=int, help="worker processes (default 1)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--samples", type=int)
    p.add_argument("--normalization", choices=["eq1", "eq4"])
    p.add_argument("--reference", choices=["rayleigh", "shifted-exponential", "none"])
    p.add_argument("--bins", type=int)
    p.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"), help="histogram range")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigforge",
        description="Stopping-time signatures of prime generation, collision walks and discrete logs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s ({kernels.BACKEND} kernels)")
    sub = parser.add_subparsers(dest="kind", required=True)

    p = sub.add_parser("primegen", help="random prime generation by rejection")
    p.add_argument("--log2-n", type=int, dest="log2_n", help="candidates lie below base**N")
    p.add_argument("--base", type=int)
    p.add_argument("--m-rounds", type=int, dest="m_rounds", help="Miller-Rabin rounds per candidate")
    p.add_argument("--mu", choices=["uniform", "sum2"])
    p.add_argument("--c", type=float, help="cost per candidate in model time")
    p.add_argument("--measure", choices=["steps", "seconds"])
    _common(p)

    p = sub.add_parser("walk", help="collision times of random walks on Z/NZ")
    p.add_argument("--variant", choices=list(harness.WALK_VARIANTS))
    p.add_argument("--modulus", type=int)
    p.add_argument("--h", type=int, help="fix h instead of drawing it per sample")
    p.add_argument("--x1", type=int, help="fix the start state instead of drawing it per sample")
    _common(p)

    p = sub.add_parser("dlog", help="discrete logarithms by collision walks")
    p.add_argument("--group", choices=["zp", "ec"])
    p.add_argument("--order-near", type=int, dest="order_near")
    p.add_argument("--algo", choices=["birthday", "rho", "rho-floyd"])
    p.add_argument("--measure", choices=["steps", "seconds"])
    _common(p)

    p = sub.add_parser("keygen", help="wall-clock RSA or ECC key generation")
    p.add_argument("--scheme", choices=["rsa", "ecc"])
    p.add_argument("--x", type=int, help="primes are drawn from [X, kappa*X]")
    p.add_argument("--kappa", type=float)
    _common(p)

    p = sub.add_parser("analyze", help="normalize and test an existing raw.csv")
    p.add_argument("raw", nargs="?", help="raw.csv to analyze")
    p.add_argument("--compare", help="second raw.csv for a two-sample KS distance")
    _common(p)
    return parser


def config_from_args(args: argparse.Namespace) -> harness.ExperimentConfig:
    data: dict = {}
    if args.config:
        data.update(harness.load_config_file(args.config))
        if data.get("kind") not in (None, args.kind) and args.kind != "analyze":
            raise harness.ConfigError(f"config file is for {data['kind']!r}, not {args.kind!r}")
    if args.kind == "analyze":
        # A summary.json config describes the run being analyzed; keep only
        # what matters for the analysis itself.
        keep = ("normalization", "reference", "bins", "range", "out")
        data = {k: v for k, v in data.items() if k in keep}
    for k, v in vars(args).items():
        if k == "config" or v is None:
            continue
        data[k] = v
    data["kind"] = args.kind
    return harness.ExperimentConfig.from_mapping(data)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        cfg.validate()
    except (harness.ConfigError, TypeError) as exc:
        print(f"sigforge: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        res = harness.run_experiment(cfg)
    except harness.ConfigError as exc:
        print(f"sigforge: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyboardInterrupt:
        print("sigforge: interrupted", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001 - every run-time failure maps to one exit code
        print(f"sigforge: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    summary = {k: v for k, v in res.summary.items() if k != "config"}
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
