#!/usr/bin/env python3
"""Monte-Carlo degeneracy-ratio experiments for the three reference graphs.

With the default sample counts this reproduces the ratios 0.605 (triangle),
0.589 (square) within +-0.01, and an estimate inside [0.528, 0.703] for the
tetrahedron.
"""
import argparse
from pathlib import Path

from degeo import SystemSpec, degeneracy_ratio, named_graph
from degeo import serialize


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--outdir", default="out")
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--n-triangle", type=int, default=100000)
    ap.add_argument("--n-square", type=int, default=100000)
    ap.add_argument("--n-tetrahedron", type=int, default=10000)
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)

    runs = [("triangle", args.n_triangle), ("square", args.n_square),
            ("tetrahedron", args.n_tetrahedron)]
    for name, n in runs:
        spec = SystemSpec(named_graph(name), 2)
        est = degeneracy_ratio(spec, n, seed=args.seed, system=name,
                               threads=args.threads)
        path = out / f"ratio_{name}.json"
        path.write_text(serialize.dumps(est.to_json_dict(), indent=1))
        print(f"{name}: {est.ratio:.4f} +- {est.stderr:.4f} "
              f"({est.degenerate}/{est.accepted} accepted of {n}) -> {path}")


if __name__ == "__main__":
    main()
