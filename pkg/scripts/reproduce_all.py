#!/usr/bin/env python3
"""Run the full experiment battery into ./out and render the figures.

Each experiment writes CSV/JSON outputs plus a manifest into its own
subdirectory.  Figure rendering needs the companion sgldiff-plots package;
it is skipped (with a note) when that package is not installed.

Usage: python scripts/reproduce_all.py [--out DIR] [--seed N] [--quick]
"""

import argparse
import subprocess
import sys
from pathlib import Path

EXPERIMENTS = (
    "figure1",
    "figure2",
    "strong-error",
    "ergodicity",
    "coupling",
    "verify",
    "constants",
)

QUICK_OVERRIDES = """\
horizon = 100.0
n_replicas = 4
"""


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="out")
    parser.add_argument("--seed", type=int, default=20240101)
    parser.add_argument("--quick", action="store_true",
                        help="small sizes for a fast end-to-end pass")
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    quick_cfg = None
    if args.quick:
        quick_cfg = out / "quick.toml"
        quick_cfg.write_text(QUICK_OVERRIDES)

    failures = []
    for name in EXPERIMENTS:
        dest = out / name.replace("-", "_")
        cmd = [sys.executable, "-m", "sgldiff", name,
               "--out", str(dest), "--seed", str(args.seed)]
        if quick_cfg is not None and name in ("figure1", "figure2"):
            cmd += ["--config", str(quick_cfg)]
        print(f"--> {' '.join(cmd)}")
        code = subprocess.call(cmd)
        if code != 0:
            failures.append((name, code))

    try:
        from sgldiff_plots import FigureSpec, render_figure1, render_figure2, save_figure
    except ImportError:
        print("sgldiff-plots not installed; skipping figure rendering")
    else:
        spec1 = FigureSpec(out / "figure1", out / "figure1.png")
        save_figure(render_figure1(spec1), spec1)
        spec2 = FigureSpec(out / "figure2", out / "figure2.png")
        save_figure(render_figure2(spec2), spec2)
        print(f"figures rendered into {out}")

    if failures:
        print(f"non-zero exits: {failures}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
