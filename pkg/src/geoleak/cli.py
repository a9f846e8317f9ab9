"""Command-line front end: run scenarios, emit obfuscation scatters, infer patterns.

Exit codes: 0 on success outcomes, 2 when an attack run fails (victim never
visible, non-convergence, empty region), 1 on usage or configuration errors.
Set GEOLEAK_LOG=error|info|debug for diagnostics.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .harness import (
    emit_scatter,
    load_samples_csv,
    run_suite,
    save_samples_csv,
    scenario_from_json,
    with_seed,
)
from .obfuscation import HORNET_DEFAULT, InsufficientSamples, infer_pattern, pattern_from_json
from .scenarios import PRESETS, preset

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ATTACK_FAILED = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; here 2 is reserved for
    # attack-failure outcomes
    def error(self, message):
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="geoleak", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a scenario end to end")
    run.add_argument(
        "--scenario",
        required=True,
        help=f"scenario JSON file, or preset:<name> ({', '.join(sorted(PRESETS))})",
    )
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.add_argument("--out", type=Path, default=None, help="directory for GeoJSON/CSV artifacts")
    run.add_argument("--reps", type=int, default=1, help="repetitions with derived seeds seed+i")

    scatter = sub.add_parser("scatter", help="emit obfuscation samples as CSV")
    scatter.add_argument("--pattern", default="preset:hornet", help="pattern JSON file or preset:hornet")
    scatter.add_argument("--locations", type=int, default=3000)
    scatter.add_argument("--queries", type=int, default=30, help="queries per location")
    scatter.add_argument("--max-dist", type=float, default=3000.0, help="max true distance, meters")
    scatter.add_argument("--seed", type=int, default=0)
    scatter.add_argument("--out", type=Path, required=True, help="output CSV path")

    infer = sub.add_parser("infer", help="infer a pattern from a samples CSV")
    infer.add_argument("--samples", type=Path, required=True, help="CSV with true_m,shown_m columns")
    return parser


def _load_scenario(spec: str):
    if spec.startswith("preset:"):
        return preset(spec.removeprefix("preset:"))
    with open(spec) as fh:
        return scenario_from_json(json.load(fh))


def _load_pattern(spec: str):
    if spec == "preset:hornet":
        return HORNET_DEFAULT
    with open(spec) as fh:
        return pattern_from_json(json.load(fh))


def _cmd_run(args) -> int:
    scenario = _load_scenario(args.scenario)
    if args.seed is not None:
        scenario = with_seed(scenario, args.seed)
    rows, summaries = run_suite([scenario], args.reps, out_dir=args.out)
    for r in rows:
        err = "-" if r.localization_error is None else f"{r.localization_error:.2f} m"
        print(f"{r.scenario} seed={r.seed} outcome={r.outcome} error={err} "
              f"queries={r.queries} victim_profile_queries={r.victim_profile_queries}")
    for s in summaries:
        med = "-" if s.median_error is None else f"{s.median_error:.2f} m"
        print(f"{s.scenario}: {s.runs} runs, success rate {s.success_rate:.2f}, median error {med}")
    return EXIT_OK if all(r.outcome == "success" for r in rows) else EXIT_ATTACK_FAILED


def _cmd_scatter(args) -> int:
    pattern = _load_pattern(args.pattern)
    samples = emit_scatter(pattern, args.locations, args.queries, args.max_dist, args.seed)
    save_samples_csv(samples, args.out)
    print(f"wrote {len(samples)} samples to {args.out}")
    return EXIT_OK


def _cmd_infer(args) -> int:
    samples = load_samples_csv(args.samples)
    inferred = infer_pattern(samples)
    print(json.dumps(inferred.to_json(), indent=2, sort_keys=True))
    return EXIT_OK


def main(argv=None) -> int:
    level = os.environ.get("GEOLEAK_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR))
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "scatter":
            return _cmd_scatter(args)
        return _cmd_infer(args)
    except (OSError, ValueError, KeyError, InsufficientSamples) as exc:
        print(f"geoleak: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
