"""Command-line front end for the experiment harness.

Each subcommand maps onto one experiment kind; options either come from a
JSON config file (--config) or from flags, with flags winning.  Exit codes:
0 on success, 1 when the verification suite reports failures beyond its
budget, 2 on configuration or I/O errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .harness import EXPERIMENT_KINDS, ExperimentSpec, run_experiment


def _parse_bool(text: str) -> bool:
    val = text.strip().lower()
    if val in ("true", "1", "yes", "on"):
        return True
    if val in ("false", "0", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gradem",
        description="Gradient EM experiments on isotropic Gaussian mixtures.",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in EXPERIMENT_KINDS:
        p = sub.add_parser(kind)
        p.add_argument("--config", help="JSON file of ExperimentSpec fields")
        p.add_argument("--d", type=int, help="ambient dimension")
        p.add_argument("--n", type=int, help="number of mixture components")
        p.add_argument("--eta", type=float, help="step size")
        p.add_argument("--steps", type=int, help="number of gradient steps")
        p.add_argument("--samples", type=int, help="Monte Carlo batch size")
        p.add_argument("--seed", type=int, help="base RNG seed")
        p.add_argument("--out", help="output directory")
        p.add_argument(
            "--antithetic", type=_parse_bool, help="antithetic pairing (true/false)"
        )
        p.add_argument("--log-every", type=int, dest="log_every", help="logging stride")
    return parser


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
        known = {f.name for f in dataclasses.fields(ExperimentSpec)}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config fields: {sorted(extra)}")
    else:
        data = {}
    data["kind"] = args.kind
    for name in ("d", "n", "eta", "steps", "samples", "seed", "out", "antithetic",
                 "log_every"):
        value = getattr(args, name, None)
        if value is not None:
            data[name] = value
    return ExperimentSpec(**data)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = spec_from_args(args)
    except (OSError, ValueError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        result = run_experiment(spec)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if spec.kind == "verify":
        report = result
        counts = report["failure_counts"]
        for name in sorted(counts):
            print(f"{name}: {counts[name]} failing / budget {report['failure_budgets'][name]}")
        if not report["all_passed"]:
            print("verification FAILED", file=sys.stderr)
            return 1
        print("verification passed")
    else:
        print(f"{spec.kind}: results written to {spec.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
