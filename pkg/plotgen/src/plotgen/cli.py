"""Command-line interface.

    plotgen --input results/ --output fig.png [--x-axis time|iter]
            [--include GDA,MCN,...] [--linear-y]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .render import PlotInputError, PlotSpec, render


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotgen",
        description="Render convergence figures from benchmark trajectories.")
    parser.add_argument("--input", required=True,
                        help="results directory containing index.json")
    parser.add_argument("--output", required=True, help="output image file")
    parser.add_argument("--x-axis", choices=("time", "iter"), default="time")
    parser.add_argument("--include", default="",
                        help="comma-separated run names (default: all)")
    parser.add_argument("--linear-y", action="store_true",
                        help="disable the logarithmic gap axis")
    args = parser.parse_args(argv)

    include = [s for s in (p.strip() for p in args.include.split(",")) if s]
    spec = PlotSpec(input_dir=Path(args.input), output=Path(args.output),
                    x_axis=args.x_axis, log_y=not args.linear_y,
                    include=include)
    try:
        image, sidecar = render(spec)
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {image} and {sidecar}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
