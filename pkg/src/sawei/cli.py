"""Command-line entry point: run experiments, sweep controller settings,
and render reports."""

from __future__ import annotations

import argparse
import json
import sys

from .harness import ExperimentConfig, ablation_sweep, run_experiment
from .report import emit_report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sawei",
        description="Self-adjusting weighted-EI Bayesian optimization benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a task x schedule x seed experiment grid")
    run_p.add_argument("--config", required=True, help="JSON experiment config")
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument("--workers", type=int, default=1)

    sweep_p = sub.add_parser("sweep", help="controller hyperparameter ablation sweep")
    sweep_p.add_argument("--config", required=True, help="JSON experiment config")
    sweep_p.add_argument("--grid", default="default",
                         help="'default' or a JSON file with the sweep grid")
    sweep_p.add_argument("--out", required=True, help="output directory")
    sweep_p.add_argument("--workers", type=int, default=1)

    rep_p = sub.add_parser("report", help="render CSV summaries (and figures) from artifacts")
    rep_p.add_argument("--in", dest="in_dir", required=True, help="experiment output directory")
    rep_p.add_argument("--plots", action="store_true", help="also render SVG figures")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        cfg = ExperimentConfig.from_file(args.config)
        manifest = run_experiment(cfg, args.out, workers=args.workers)
        print(f"wrote {len(manifest['runs'])} traces to {args.out}"
              + (f" ({len(manifest['failures'])} failures)" if manifest["failures"] else ""))
        return 0
    if args.command == "sweep":
        cfg = ExperimentConfig.from_file(args.config)
        grid = None
        if args.grid != "default":
            with open(args.grid) as fh:
                grid = json.load(fh)
        summary = ablation_sweep(cfg, grid, args.out, workers=args.workers)
        print(f"swept {len(summary['combos'])} combinations into {args.out}")
        return 0
    if args.command == "report":
        written = emit_report(args.in_dir, plots=args.plots)
        print("\n".join(str(p) for p in written))
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
