"""Command-line interface.

Subcommands: classify, region, ratio, functional, scan.  Every command
writes machine-readable JSON (or CSV where documented); identical config
and seed give byte-identical output.  Exit codes: 0 success (including
runs that only carry warnings), 1 numerical failure, 2 configuration
error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import serialize
from .errors import CatalogError, DomainError, NumericalError
from .geometry import degeneracy_directions, ray_scan, segment_scan, structure_sweep
from .inversion import (InversionOptions, SystemSpec, degeneracy_ratio,
                        ground_class, universal_F)
from .lattice import graph_names, load_graph, named_graph
from .regions import (region_export_csv, region_export_dict, sample_DC,
                      sample_DR, sample_ensemble)


def _parse_vector(text: str) -> np.ndarray:
    return np.array([float(x) for x in text.replace(",", " ").split()])


def _load_vector(path: str) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return _parse_vector(fh.read())


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--graph", help=f"named graph ({', '.join(graph_names())})")
    p.add_argument("--graph-file", help="graph file (M line, then `i j [w]` lines)")
    p.add_argument("--N", type=int, default=2, help="particle number")
    p.add_argument("--v", help="potential, comma separated")
    p.add_argument("--v-file", help="potential from file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--deg-tol", type=float, default=1e-9)
    p.add_argument("--rank-tol", type=float, default=1e-8)
    p.add_argument("--inv-tol", type=float, default=1e-7)
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--threads", type=int,
                   default=int(os.environ.get("DEGEO_THREADS", "1")))
    p.add_argument("--config", help="JSON config file; overrides flags")


def _apply_config(args):
    if not args.config:
        return args
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    for key, val in cfg.items():
        setattr(args, key.replace("-", "_"), val)
    return args


def _system(args) -> tuple[SystemSpec, str]:
    if args.graph and args.graph_file:
        raise DomainError("give either --graph or --graph-file, not both")
    if args.graph:
        g = named_graph(args.graph)
        label = args.graph
    elif args.graph_file:
        g = load_graph(args.graph_file)
        label = os.path.basename(args.graph_file)
    else:
        raise DomainError("a graph is required (--graph or --graph-file)")
    spec = SystemSpec(g, args.N, deg_tol=args.deg_tol, rank_tol=args.rank_tol)
    return spec, f"{label} N={args.N}"


def _potential(args, M: int) -> np.ndarray:
    if args.v is not None:
        v = _parse_vector(args.v)
    elif args.v_file:
        v = _load_vector(args.v_file)
    else:
        v = np.zeros(M)
    if v.size != M:
        raise DomainError(f"potential length {v.size} != M={M}")
    return v


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def cmd_classify(args) -> int:
    spec, label = _system(args)
    v = _potential(args, spec.M)
    es, dc = ground_class(spec, v)
    dirs = degeneracy_directions(dc)
    report = {
        "system": label,
        "v": v,
        "g": es.degree,
        "kappa": dc.kappa,
        "dimD": dc.dimD,
        "gap": es.gap,
        "energy": es.energy,
        "factors": {"diag": dc.factors_diag, "off": dc.factors_off},
        "kernel_dim": dirs.dim,
        "ullrich_kohn_bound": dirs.bound,
        "ambiguous_multiplet": es.ambiguous,
    }
    _emit(args, serialize.dumps(report, indent=1))
    return 0


def cmd_region(args) -> int:
    spec, label = _system(args)
    v = _potential(args, spec.M)
    es, dc = ground_class(spec, v)
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    sampler = {"R": sample_DR, "C": sample_DC, "ensemble": sample_ensemble}[args.level]
    sample = sampler(dc, args.n, rng)
    if args.format == "csv":
        _emit(args, region_export_csv(sample))
    else:
        _emit(args, serialize.dumps(region_export_dict(sample, label, spec.N), indent=1))
    return 0


def cmd_ratio(args) -> int:
    spec, label = _system(args)
    est = degeneracy_ratio(spec, args.n_samples, seed=args.seed,
                           thresholds={"tol": args.inv_tol},
                           system=label, threads=max(args.threads, 1))
    _emit(args, serialize.dumps(est.to_json_dict(), indent=1))
    return 0


def cmd_functional(args) -> int:
    spec, label = _system(args)
    center = _parse_vector(args.plane_center)
    pa = _parse_vector(args.plane_a)
    pb = _parse_vector(args.plane_b)
    for vec in (center, pa, pb):
        if vec.size != spec.M:
            raise DomainError("plane densities must have length M")
    opts = InversionOptions(tol=args.inv_tol)
    grid = np.linspace(-args.span, args.span, args.resolution)
    rows = []
    for a in grid:
        for b in grid:
            rho = center + a * (pa - center) + b * (pb - center)
            in_dom = bool(rho.min() >= -1e-12 and rho.max() <= 1 + 1e-12
                          and abs(rho.sum() - spec.N) <= 1e-8)
            row = {"ab": [a, b], "rho": rho, "in_domain": in_dom,
                   "F": None, "converged": False}
            if in_dom:
                fv = universal_F(spec, np.clip(rho, 0, 1), opts)
                row["F"] = fv.value
                row["converged"] = bool(not fv.lower_bound_only)
            rows.append(row)
    report = {"system": label, "plane": {"center": center, "a": pa, "b": pb,
                                         "span": args.span,
                                         "resolution": args.resolution},
              "grid": rows}
    _emit(args, serialize.dumps(report, indent=1))
    return 0


def _scan_report_dict(rep, label):
    return {
        "system": label,
        "grid": rep.grid,
        "ground_energy": rep.ground_energy,
        "gap": rep.gap,
        "g": rep.g,
        "ground_density": rep.ground_density,
        "crossings": list(rep.crossings),
        "shared_density": rep.shared_density,
        "shared_point": rep.shared_point,
        "max_deviation": rep.max_deviation,
        "boundary_coordinate": list(rep.boundary_coordinate) if rep.boundary_coordinate else None,
    }


def cmd_scan(args) -> int:
    spec, label = _system(args)
    if args.mode == "segment":
        v_I = _potential(args, spec.M)
        if not args.v2:
            raise DomainError("segment mode needs --v2")
        v_II = _parse_vector(args.v2)
        rep = segment_scan(spec, v_I, v_II, grid_n=args.grid_n)
        _emit(args, serialize.dumps(_scan_report_dict(rep, label), indent=1))
    elif args.mode == "ray":
        v_A = _potential(args, spec.M)
        if not args.direction:
            raise DomainError("ray mode needs --direction")
        d = _parse_vector(args.direction)
        svals = _parse_vector(args.s_values)
        rep = ray_scan(spec, v_A, d, svals)
        _emit(args, serialize.dumps(_scan_report_dict(rep, label), indent=1))
    elif args.mode == "sweep":
        lo, hi, num = args.s_grid.split(":")
        svals = np.linspace(float(lo), float(hi), int(num))
        if args.family == "site":
            channels = (list(range(1, spec.M + 1)) if args.sites == "all"
                        else [int(s) for s in args.sites.split(",")])

            def family(site, s):
                v = np.zeros(spec.M)
                v[int(site) - 1] = s
                return v
        else:  # site-difference directions v = s (e_i - e_j)
            if not args.pairs:
                raise DomainError("sweep family 'diff' needs --pairs like 1-3,2-4")
            channels = []
            for tok in args.pairs.split(","):
                i, j = tok.split("-")
                channels.append((int(i) - 1) * spec.M + (int(j) - 1))

            def family(code, s):
                i, j = divmod(int(code), spec.M)
                v = np.zeros(spec.M)
                v[i] = s
                v[j] = -s
                return v
        params = [(ch, s) for ch in channels for s in svals]
        rows = structure_sweep(spec, family, params, n_points=args.n, seed=args.seed)
        _emit(args, serialize.dumps(rows, indent=1))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="degeo",
                                 description="degeneracy geometry toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="(g, kappa) classification at a potential")
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("region", help="sample a degeneracy region")
    _add_common(p)
    p.add_argument("--level", choices=["R", "C", "ensemble"], default="R")
    p.add_argument("--n", type=int, default=2000)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("ratio", help="Monte-Carlo degeneracy ratio")
    _add_common(p)
    p.add_argument("--n-samples", type=int, default=100000)
    p.set_defaults(func=cmd_ratio)

    p = sub.add_parser("functional", help="universal functional on a density plane")
    _add_common(p)
    p.add_argument("--plane-center", required=True)
    p.add_argument("--plane-a", required=True)
    p.add_argument("--plane-b", required=True)
    p.add_argument("--resolution", type=int, default=21)
    p.add_argument("--span", type=float, default=1.0)
    p.set_defaults(func=cmd_functional)

    p = sub.add_parser("scan", help="segment / ray / sweep scans")
    _add_common(p)
    p.add_argument("--mode", choices=["segment", "ray", "sweep"], required=True)
    p.add_argument("--v2", help="second potential (segment mode)")
    p.add_argument("--grid-n", type=int, default=21)
    p.add_argument("--direction", help="ray direction")
    p.add_argument("--s-values", default="-0.5,-1,-2,-5")
    p.add_argument("--s-grid", default="0.5:5:10", help="lo:hi:n (sweep mode)")
    p.add_argument("--family", choices=["site", "diff"], default="site",
                   help="sweep family: single-site or site-difference potentials")
    p.add_argument("--sites", default="all", help="sweep sites, e.g. 1,2 or all")
    p.add_argument("--pairs", help="site pairs for --family diff, e.g. 1-3,2-4")
    p.add_argument("--n", type=int, default=400, help="cloud points per sweep entry")
    p.set_defaults(func=cmd_scan)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args = _apply_config(args)
        return args.func(args)
    except (DomainError, CatalogError, FileNotFoundError, KeyError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
