"""plotkit command line: render one figure kind from one CSV."""

from __future__ import annotations

import argparse
import sys

from .figures import DEFAULT_BUCKET, KINDS, PlotSpec, render
from .schema import SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render typed-exchange experiment CSVs into figures",
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="csv_path", required=True)
    parser.add_argument("--out", dest="out_path", required=True,
                        help="image path; format by extension (.svg/.png)")
    parser.add_argument("--bucket", type=float, default=DEFAULT_BUCKET,
                        help="k/|V| bucket width for the phase figure")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render(PlotSpec(args.kind, args.csv_path, args.out_path, args.bucket))
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
