"""Command-line experiment runner.

Subcommands reproduce the reference experiments and run the verifier
battery, emitting CSV data files, JSON summaries, and a run manifest into
the output directory.  Exit codes: 0 success, 1 check failure, 2 invalid
configuration, 3 runtime/divergence error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .config import EXPERIMENTS, load_config
from .errors import ConfigError, SgldiffError
from .experiments import RUNNERS

_EXAMPLES = """examples:
  sgldiff figure1 --out out/fig1 --seed 7
  sgldiff figure2 --eta 10,1,0.1,0.01,0.001 --out out/fig2
  sgldiff verify --config verify.toml
  sgldiff constants --out out/const
"""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sgldiff",
        description="Switched Langevin diffusion experiments and bound verification.",
        epilog=_EXAMPLES,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"sgldiff {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name.replace("_", "-"), help=f"run the {name} experiment")
        p.set_defaults(experiment=name)
        p.add_argument("--config", default=None, help="TOML config file")
        p.add_argument("--seed", type=int, default=None, help="root seed override")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument(
            "--threads", type=int, default=None,
            help="replica worker threads (or SGLDIFF_THREADS)",
        )
        p.add_argument(
            "--eta", default=None,
            help="comma-separated learning rates, e.g. 0.1,0.01",
        )
        if name == "verify":
            p.add_argument(
                "--checks", default=None,
                help="comma-separated check names (empty string = empty battery)",
            )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    etas = None
    if args.eta is not None:
        try:
            etas = tuple(float(v) for v in args.eta.split(",") if v.strip())
        except ValueError:
            print(f"error: cannot parse --eta {args.eta!r}", file=sys.stderr)
            return 2
    checks = None
    if getattr(args, "checks", None) is not None:
        checks = tuple(v.strip() for v in args.checks.split(",") if v.strip())
    try:
        cfg = load_config(
            args.experiment,
            config_path=args.config,
            seed=args.seed,
            out_dir=args.out,
            threads=args.threads,
            etas=etas,
            checks=checks,
        )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    runner = RUNNERS[cfg.experiment]
    try:
        result = runner(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SgldiffError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3

    if cfg.experiment == "verify":
        for entry in result.summary["checks"]:
            status = "pass" if entry["passed"] else "FAIL"
            print(f"[{status}] {entry['check']}: estimate={entry['estimate']:.6g} "
                  f"bound={entry['bound']:.6g}")
        print(f"all_passed={result.summary['all_passed']}")
    elif cfg.experiment == "constants":
        consts = result.summary["constants"]
        for key in ("L", "K", "R", "d", "c", "C", "c_phi", "C1_phi",
                    "C_phi_theta0_d", "C1_d", "C_phi_d"):
            print(f"{key} = {consts[key]:.10g}")
    else:
        for key, value in sorted(result.summary.items()):
            if isinstance(value, (int, float, bool)):
                print(f"{key} = {value}")
    print(f"outputs written to {cfg.out_dir}")
    return result.exit_code


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
