"""Command line entry point: render --spec <path>."""
from __future__ import annotations

import argparse
import sys

from .render import render
from .spec import SpecError, load_spec


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="reportplots",
        description="Render figures from collapse-laboratory CSV outputs",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render")
    p.add_argument("--spec", required=True)
    args = parser.parse_args(argv)
    try:
        image, caption = render(load_spec(args.spec))
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2
    print(image)
    print(caption)
    return 0


if __name__ == "__main__":
    sys.exit(main())
