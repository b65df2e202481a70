"""Command line entry point: ``render --kind <k> --in <paths...> --out <dir>``."""

from __future__ import annotations

import argparse
import json
import sys

from .io import SchemaError
from .render import FIGURE_KINDS, PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render experiment CSV/JSON outputs to PNG figures.",
    )
    parser.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    parser.add_argument(
        "--in", dest="inputs", nargs="+", required=True, metavar="PATH",
        help="input CSV/JSON files",
    )
    parser.add_argument("--out", default="figures", help="output directory")
    scale = parser.add_mutually_exclusive_group()
    scale.add_argument(
        "--logy", dest="logy", action="store_true", default=None,
        help="force a logarithmic y axis",
    )
    scale.add_argument(
        "--liny", dest="logy", action="store_false",
        help="force a linear y axis",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = PlotSpec(
            kind=args.kind, inputs=args.inputs, out_dir=args.out, logy=args.logy
        )
        target = render(spec)
    except (SchemaError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"render: {exc}", file=sys.stderr)
        return 2
    print(target)
    return 0


if __name__ == "__main__":
    sys.exit(main())
