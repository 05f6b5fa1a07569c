"""Command-line entry point.

One subcommand per scenario; a flat key=value config file supplies the
parameters and the flags --seed / --size / --flavor override it.  Each run
writes a CSV table, a summary.json, any scenario artifacts, and rendered
figures into the output directory.  The exit code is 0 iff no row was
flagged unreliable (override with --allow-unreliable).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .harness import SCENARIOS, ScenarioConfig, run_scenario
from .report import render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topoindex",
        description="Topological indices of disordered 2D lattice insulators.",
    )
    sub = parser.add_subparsers(dest="scenario", required=True, metavar="scenario")
    for name in SCENARIOS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        p.add_argument("--config", metavar="PATH", help="flat key=value config file")
        p.add_argument("--out", metavar="DIR", default=None,
                       help="output directory (default: ./runs/<scenario>)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the seeds list with one seed")
        p.add_argument("--size", type=int, default=None,
                       help="override the geometry.L list with one size")
        p.add_argument("--flavor", choices=("z", "z2"), default=None,
                       help="override the index flavor")
        p.add_argument("--allow-unreliable", action="store_true",
                       help="exit 0 even when rows are flagged unreliable")
    return parser


def load_config(args) -> ScenarioConfig:
    if args.config:
        cfg = ScenarioConfig.from_file(args.config)
        if cfg.scenario != args.scenario:
            cfg = dataclasses.replace(cfg, scenario=args.scenario)
    else:
        cfg = ScenarioConfig(scenario=args.scenario)
    overrides = {}
    if args.seed is not None:
        overrides["seeds"] = (args.seed,)
    if args.size is not None:
        overrides["L_values"] = (args.size,)
    if args.flavor is not None:
        overrides["flavor"] = args.flavor
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    outdir = args.out or os.path.join("runs", args.scenario)
    result = run_scenario(cfg, outdir)
    figures = render(result, outdir)
    if figures:
        summary_path = os.path.join(outdir, "summary.json")
        with open(summary_path) as fh:
            summary = json.load(fh)
        summary["figures"] = figures
        with open(summary_path, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(f"{cfg.scenario}: {len(result.rows)} rows, "
          f"{result.unreliable_rows} unreliable -> {outdir}")
    if result.unreliable_rows and not args.allow_unreliable:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
