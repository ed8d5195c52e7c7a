"""CLI: render one figure from results CSVs."""

import argparse
import sys

from .figures import KINDS, FigureSpec, plot


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="d2dplot",
        description="Render benchmark figures from results CSVs")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="inputs", required=True, nargs="+",
                        help="results CSV file(s), one per configuration")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        path = plot(FigureSpec(inputs=args.inputs, kind=args.kind,
                               output_path=args.out))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
