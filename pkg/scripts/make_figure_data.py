#!/usr/bin/env python3
"""Produce the figure datasets (and figures, when degeo-plots is installed).

Outputs, under --outdir:
  cloud_tetrahedron.json    level-R cloud of the tetrahedron at v=0
  sweep_tetrahedron.json    single-site potential sweep (cylinder bundles)
  sweep_square.json         square-graph bundle sweep (flattening ellipses)
  fsurface_square.json      universal functional on the square middle plane
"""
import argparse
import shutil
import subprocess
import sys
from pathlib import Path


def sh(args):
    print("+", " ".join(args))
    subprocess.run(args, check=True)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--outdir", default="out")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--n", type=int, default=20000, help="cloud points")
    ap.add_argument("--resolution", type=int, default=25, help="F-surface grid")
    ap.add_argument("--render", action="store_true",
                    help="also render PNGs via the plots package")
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)

    sh(["degeo", "region", "--graph", "tetrahedron", "--level", "R",
        "--n", str(args.n), "--seed", str(args.seed),
        "--out", str(out / "cloud_tetrahedron.json")])
    sh(["degeo", "scan", "--graph", "tetrahedron", "--mode", "sweep",
        "--s-grid", "0.5:8:10", "--sites", "all", "--n", "1500",
        "--seed", str(args.seed), "--out", str(out / "sweep_tetrahedron.json")])
    sh(["degeo", "scan", "--graph", "square", "--mode", "sweep",
        "--family", "diff", "--pairs", "1-3,2-4", "--s-grid", "-8:8:17",
        "--n", "1500", "--seed", str(args.seed),
        "--out", str(out / "sweep_square.json")])
    sh(["degeo", "functional", "--graph", "square",
        "--plane-center", "0.5,0.5,0.5,0.5",
        "--plane-a", "0.75,0.5,0.25,0.5",
        "--plane-b", "0.5,0.75,0.5,0.25",
        "--resolution", str(args.resolution), "--span", "2.0",
        "--out", str(out / "fsurface_square.json")])

    if args.render:
        if shutil.which("plots") is None:
            sys.exit("plots is not installed; install the plots/ package first")
        for kind, name in [("cloud3d", "cloud_tetrahedron"),
                           ("structure3d", "sweep_tetrahedron"),
                           ("structure3d", "sweep_square"),
                           ("surface3d", "fsurface_square")]:
            sh(["plots", "render", "--kind", kind,
                "--in", str(out / f"{name}.json"),
                "--out", str(out / f"{name}.png")])


if __name__ == "__main__":
    main()
