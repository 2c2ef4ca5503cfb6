"""CLI: plots render --kind cloud3d --in file.json --out fig.png"""
from __future__ import annotations

import argparse
import sys

from .render import SchemaError, render


def build_parser():
    ap = argparse.ArgumentParser(prog="plots", description="dataset renderer")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render an exported dataset")
    p.add_argument("--kind", required=True,
                   choices=["cloud3d", "structure3d", "surface3d", "ellipses"])
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", dest="out_path", required=True)
    p.add_argument("--N", type=int, default=None,
                   help="particle number for the wireframe when the schema "
                        "does not carry raw densities (default 2)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render(args.kind, args.in_path, args.out_path, N=args.N)
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
