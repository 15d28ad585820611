"""Command line: ``render --bundle DIR --fig ID --out FILE``.

Exit codes: 0 success, 2 schema/usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import FigureSpec, render
from .schema import FIGURE_IDS, SchemaError


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render a simulation bundle (CSV tables) into a figure image.",
    )
    parser.add_argument("--bundle", required=True, metavar="DIR", help="bundle directory")
    parser.add_argument("--fig", required=True, choices=FIGURE_IDS, metavar="ID",
                        help=f"figure id ({', '.join(FIGURE_IDS)})")
    parser.add_argument("--out", required=True, metavar="FILE", help="output image path")
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)

    try:
        out = render(FigureSpec(bundle=Path(args.bundle), fig_id=args.fig, out=Path(args.out), dpi=args.dpi))
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{args.fig}: wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
