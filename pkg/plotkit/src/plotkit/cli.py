"""Command line: render --in trajectory.csv --out diagram.svg [--png]"""

from __future__ import annotations

import argparse
import sys

from .render import DiagramSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render a gaussdiv trajectory CSV as a rate-plane diagram",
    )
    parser.add_argument("--in", dest="infile", required=True,
                        help="trajectory CSV (t,eps,mu,delta,kappa,region)")
    parser.add_argument("--out", dest="outfile", required=True,
                        help="output SVG (or PNG with --png)")
    parser.add_argument("--png", action="store_true",
                        help="write a PNG instead of the canonical SVG")
    args = parser.parse_args(argv)
    try:
        render(args.infile, args.outfile, DiagramSpec(png=args.png))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
