"""Command line interface: ``plotkit plot --in results.csv --kind power --out fig.png``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .data import SchemaError
from .render import KINDS, PlotSpec, render

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_IO = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render sweep result CSVs as mean-MSE trend figures with standard-error bands.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    plot = sub.add_parser("plot", help="render one figure from one result CSV")
    plot.add_argument("--in", dest="csv_in", required=True, help="input result CSV")
    plot.add_argument("--kind", choices=sorted(KINDS), required=True,
                      help="figure kind; must match the CSV's sweep axis")
    plot.add_argument("--out", dest="image_out", required=True, help="output image path")
    plot.add_argument("--logy", action="store_true", help="logarithmic y axis (default: linear)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    spec = PlotSpec(
        csv_in=Path(args.csv_in),
        kind=args.kind,
        image_out=Path(args.image_out),
        logy=args.logy,
    )
    try:
        out = render(spec)
    except SchemaError as exc:
        print(f"error: {exc} (column {exc.column!r})", file=sys.stderr)
        return EXIT_SCHEMA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
