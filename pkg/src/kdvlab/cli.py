"""Command-line entry point.

Subcommands mirror the experiment suites: evolve, smoothing, mkdv-smoothing,
normalform-check, multiplier-scan, bilinear-ensemble, resonant-ladder,
talbot.  Global flags --seed, --out-dir and --threads apply to every
subcommand and can also be supplied through the environment as KDVLAB_SEED,
KDVLAB_OUT_DIR and KDVLAB_THREADS (flags win over the environment).
"""

from __future__ import annotations

import argparse
import os
import sys

from .runner import EXPERIMENTS, ConfigError, parse_config, run_suite

ENV_PREFIX = "KDVLAB_"


def _env_default(name: str, fallback):
    return os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"), fallback)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=None, help="master RNG seed")
    sub.add_argument("--out-dir", default=None, help="artifact directory")
    sub.add_argument("--threads", type=int, default=None,
                     help="concurrent replicas for independent plan items")
    sub.add_argument("--config", default=None, help="INI run plan (flags override)")


_FLAG_SPECS: dict[str, list[tuple[str, str]]] = {
    # (flag, plan key); values are passed through as strings and parsed by
    # the plan schema, so lists use comma separation
    "evolve": [],
    "smoothing": [("--s", "s"), ("--s1", "s1"), ("--ladder", "ladder"),
                  ("--horizon", "horizon"), ("--dt", "dt"),
                  ("--amplitude", "amplitude"), ("--scheme", "scheme")],
    "mkdv-smoothing": [("--s", "s"), ("--s1", "s1"), ("--ladder", "ladder"),
                       ("--horizon", "horizon"), ("--dt", "dt"),
                       ("--amplitude", "amplitude"), ("--method", "method")],
    "normalform-check": [("--modes", "modes"), ("--trials", "trials"),
                         ("--support", "support")],
    "multiplier-scan": [("--s", "s"), ("--s1", "s1"), ("--eps", "eps"), ("--K", "K")],
    "bilinear-ensemble": [("--s", "s"), ("--s1", "s1"), ("--trials", "trials"),
                          ("--modes", "modes")],
    "resonant-ladder": [("--s", "s"), ("--s1", "s1"), ("--ladder", "ladder")],
    "talbot": [("--time", "time"), ("--grid", "grid"), ("--modes", "modes"),
               ("--ladder", "ladder"), ("--out", "out")],
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kdvlab",
        description="spectral experiments for the periodic KdV family",
    )
    subs = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sub = subs.add_parser(name, help=f"run the {name} suite")
        _add_common(sub)
        for flag, key in _FLAG_SPECS.get(name, []):
            sub.add_argument(flag, dest=f"param_{key}", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    flags: dict[str, str] = {}
    if args.config:
        try:
            base = parse_config(args.config)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        if base.experiment != args.experiment:
            print(f"config error: config runs {base.experiment!r}, "
                  f"command line says {args.experiment!r}", file=sys.stderr)
            return 2
        flags.update({k: _fmt_param(v) for k, v in base.params.items()})
        seed, out_dir, threads = base.seed, base.out_dir, base.threads
    else:
        seed, out_dir, threads = 42, "artifacts", 1

    seed = int(_env_default("seed", seed))
    out_dir = _env_default("out_dir", out_dir)
    threads = int(_env_default("threads", threads))
    if args.seed is not None:
        seed = args.seed
    if args.out_dir is not None:
        out_dir = args.out_dir
    if args.threads is not None:
        threads = args.threads

    for key, value in vars(args).items():
        if key.startswith("param_") and value is not None:
            flags[key[len("param_"):]] = value
    flags.update({"experiment": args.experiment, "seed": str(seed),
                  "out_dir": out_dir, "threads": str(threads)})
    try:
        plan = parse_config(flags)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    status = run_suite(plan)
    print(f"{args.experiment}: artifacts in {plan.out_dir} "
          f"({'ok' if status == 0 else 'FAILED'})")
    return status


def _fmt_param(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return ", ".join(str(x) for x in v)
    return str(v)


if __name__ == "__main__":
    sys.exit(main())
