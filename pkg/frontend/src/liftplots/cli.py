"""Command line entry: ``plot <relation|lifted3d> <in.csv> <out.png>``."""

import argparse
import sys

from .render import KINDS, PlotError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot", description="Render a lift CSV (tau,l,z,a) as a figure.")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("input_csv")
    parser.add_argument("output_png")
    args = parser.parse_args(argv)
    try:
        render(args.kind, args.input_csv, args.output_png)
    except (PlotError, OSError) as exc:
        print(f"plot: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
