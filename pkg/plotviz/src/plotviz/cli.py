"""Command line entry point.

Two subcommands over stored run directories:

    plotviz traj RUN_DIR -o traj.png
    plotviz conv RUN_DIR [RUN_DIR ...] -o conv.png [--logy]

Malformed or missing artifacts exit 2 with a diagnostic on stderr;
unexpected failures exit 1.
"""

from __future__ import annotations

import argparse
import sys

from .artifacts import SchemaError
from .plots import plot_convergence, plot_trajectories


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotviz",
        description="render figures from stored run directories")
    sub = parser.add_subparsers(dest="command", required=True)

    traj = sub.add_parser("traj", help="trajectory panel for one run")
    traj.add_argument("run_dir")
    traj.add_argument("-o", "--out", required=True, help="output image path")

    conv = sub.add_parser("conv", help="convergence curves for one or more runs")
    conv.add_argument("run_dirs", nargs="+")
    conv.add_argument("-o", "--out", required=True, help="output image path")
    conv.add_argument("--logy", action="store_true", help="log scale on the mmd axis")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "traj":
            out = plot_trajectories(args.run_dir, args.out)
        else:
            out = plot_convergence(args.run_dirs, args.out, log_y=args.logy)
    except (FileNotFoundError, NotADirectoryError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
