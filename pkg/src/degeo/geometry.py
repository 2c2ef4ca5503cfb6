"""Degeneracy-preserving potential directions, scans, and sweeps.

A direction u preserves the degree of degeneracy to first order iff the
projected perturbation is proportional to the identity on the ground
eigenspace.  In the gauge where the first-order energy shift vanishes this
reads P^T u = 0, so the preserved directions are the kernel of P^T; its
dimension is bounded by M - g(g+1)/2 + kappa.  The kernel vectors are
generally not sum-free, so their sum-zero representatives (which shift the
diagonal conditions by a common constant, still preserving degeneracy) are
reported alongside.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .degmap import DegeneracyClass
from .errors import DomainError
from .fock import density_of_state, State
from .inversion import SystemSpec, ground_class, hamiltonian
from .regions import membership_in_D, sample_DR, barycentric_project
from .spectra import ground_eigenspace


@dataclass(frozen=True)
class DegeneracyDirections:
    basis: np.ndarray          # M x dim, orthonormal columns of ker P^T
    dim: int
    sum_zero_basis: np.ndarray  # gauge representatives, columns sum to zero
    strict_dim: int            # dim of ker P^T intersected with the sum-zero plane
    bound: int                 # M - g(g+1)/2 + kappa


@dataclass(frozen=True)
class ScanReport:
    grid: np.ndarray
    ground_energy: np.ndarray
    gap: np.ndarray
    g: np.ndarray
    ground_density: np.ndarray
    crossings: tuple[float, ...]
    shared_density: bool
    shared_point: np.ndarray | None
    max_deviation: float
    boundary_coordinate: tuple | None = None


def degeneracy_directions(dc: DegeneracyClass, tol: float = 1e-10) -> DegeneracyDirections:
    """Kernel of P^T, its sum-zero representatives, and the dimension bound."""
    M = dc.M
    Pt = dc.P.T  # ncols x M
    U, s, Vt = np.linalg.svd(Pt, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * max(smax, 1.0)))
    kernel = Vt[rank:].T                      # M x dim
    dim = kernel.shape[1]
    sz = kernel - kernel.mean(axis=0, keepdims=True)
    stacked = np.vstack([Pt, np.ones((1, M))])
    s2 = np.linalg.svd(stacked, compute_uv=False)
    rank2 = int(np.sum(s2 > tol * max(s2[0], 1.0)))
    return DegeneracyDirections(
        basis=kernel,
        dim=dim,
        sum_zero_basis=sz,
        strict_dim=M - rank2,
        bound=M - dc.g * (dc.g + 1) // 2 + dc.kappa,
    )


def first_order_preservation_test(spec: SystemSpec, v, u, lambdas,
                                  spread_tol: float = 1e-11) -> dict:
    """Log-log slope of the former ground multiplet's spread vs step size.

    Slope near 2 (or exact preservation) marks first-order degeneracy
    preservation; slope near 1 marks a direction that splits linearly.
    """
    v = np.asarray(getattr(v, "v", v), dtype=float)
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    es0 = ground_eigenspace(hamiltonian(spec, v), spec.deg_tol)
    g0 = es0.degree
    rows = []
    excluded = []
    for lam in lambdas:
        wl = np.linalg.eigvalsh(hamiltonian(spec, v + lam * u).H)
        spread = float(wl[g0 - 1] - wl[0])
        gap_above = float(wl[g0] - wl[g0 - 1]) if g0 < wl.size else np.inf
        if gap_above <= spread:   # multiplet crossed another level
            excluded.append(lam)
            continue
        rows.append((lam, spread))
    spreads = np.array([r[1] for r in rows])
    lams = np.array([r[0] for r in rows])
    exact = bool(len(rows) > 0 and spreads.max() <= spread_tol)
    slope = None
    if not exact and len(rows) >= 2:
        slope = float(np.polyfit(np.log(lams), np.log(np.maximum(spreads, 1e-300)), 1)[0])
    return {
        "g0": g0,
        "lambdas": lams,
        "spreads": spreads,
        "excluded": excluded,
        "exact_preservation": exact,
        "slope": slope,
    }


def _scan_point(spec: SystemSpec, v):
    es = ground_eigenspace(hamiltonian(spec, v), spec.deg_tol)
    rho = density_of_state(State(es.basis[:, 0], spec.basis)).rho
    return es, rho


def _refine_crossing(spec, v_of, lo, hi, g_lo, xtol=1e-8):
    """Bisect the parameter where the ground degree jumps."""
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        es = ground_eigenspace(hamiltonian(spec, v_of(mid)), spec.deg_tol)
        if es.degree == g_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def segment_scan(spec: SystemSpec, v_I, v_II, grid_n: int = 21,
                 margin: float = 0.1, dev_tol: float = 1e-8) -> ScanReport:
    """Scan lam v_I + (1-lam) v_II over lam in [-margin, 1+margin].

    Reports per-point degree, energy, gap, ground density, refined degree
    crossings, and whether all interior points share one ground density
    that belongs to both endpoint regions.
    """
    if grid_n < 3:
        raise DomainError("need grid_n >= 3")
    vI = np.asarray(getattr(v_I, "v", v_I), dtype=float)
    vII = np.asarray(getattr(v_II, "v", v_II), dtype=float)
    lams = np.linspace(-margin, 1 + margin, grid_n)
    v_of = lambda lam: lam * vI + (1 - lam) * vII
    E, gap, g, dens = [], [], [], []
    for lam in lams:
        es, rho = _scan_point(spec, v_of(lam))
        E.append(es.energy)
        gap.append(es.gap)
        g.append(es.degree)
        dens.append(rho)
    E, gap, g, dens = np.array(E), np.array(gap), np.array(g), np.array(dens)
    crossings = []
    for a in range(len(lams) - 1):
        if g[a] != g[a + 1]:
            crossings.append(_refine_crossing(spec, v_of, lams[a], lams[a + 1], g[a]))
    interior = (lams >= 0) & (lams <= 1)
    shared = False
    shared_point = None
    max_dev = np.inf
    n_int = int(interior.sum())
    if n_int:
        mid_idx = np.where(interior)[0][n_int // 2]
        cand = dens[mid_idx]
        devs = []
        for i in np.where(interior)[0]:
            if g[i] == 1:
                devs.append(float(np.abs(dens[i] - cand).max()))
            else:
                _, dc = ground_class(spec, v_of(lams[i]))
                devs.append(membership_in_D(dc, cand).residual)
        for vend in (vI, vII):
            _, dc = ground_class(spec, vend)
            devs.append(membership_in_D(dc, cand).residual)
        max_dev = float(np.max(devs))
        shared = max_dev <= dev_tol
        shared_point = cand if shared else None
    return ScanReport(lams, E, gap, g, dens, tuple(crossings),
                      shared, shared_point, max_dev)


def ray_scan(spec: SystemSpec, v_A, direction, s_values,
             dev_tol: float = 1e-8) -> ScanReport:
    """Ground density along v_A + s * direction for each s."""
    vA = np.asarray(getattr(v_A, "v", v_A), dtype=float)
    d = np.asarray(direction, dtype=float)
    if np.linalg.norm(d) == 0:
        raise DomainError("direction must be nonzero")
    svals = np.asarray(list(s_values), dtype=float)
    E, gap, g, dens = [], [], [], []
    for s in svals:
        es, rho = _scan_point(spec, vA + s * d)
        E.append(es.energy)
        gap.append(es.gap)
        g.append(es.degree)
        dens.append(rho)
    E, gap, g, dens = np.array(E), np.array(gap), np.array(g), np.array(dens)
    max_dev = float(np.ptp(dens, axis=0).max()) if len(dens) > 1 else 0.0
    shared = max_dev <= dev_tol
    boundary_coord = None
    if shared:
        rho = dens[0]
        pinned0 = np.where(np.abs(rho) <= 1e-8)[0]
        pinned1 = np.where(np.abs(rho - 1) <= 1e-8)[0]
        if pinned1.size:
            boundary_coord = (int(pinned1[0]) + 1, 1.0)
        elif pinned0.size:
            boundary_coord = (int(pinned0[0]) + 1, 0.0)
    crossings = []
    for a in range(len(svals) - 1):
        if g[a] != g[a + 1]:
            v_of = lambda s: vA + s * d
            crossings.append(_refine_crossing(spec, v_of, svals[a], svals[a + 1], g[a]))
    return ScanReport(svals, E, gap, g, dens, tuple(crossings),
                      shared, dens[0] if shared else None, max_dev,
                      boundary_coordinate=boundary_coord)


def locate_degeneracy_1d(spec: SystemSpec, v_of, lo: float, hi: float,
                         deg_rel_tol: float = 1e-9) -> float | None:
    """Parameter in [lo, hi] minimizing the relative many-body gap;
    returns it iff the gap closes there (a degeneracy point)."""

    def relgap(s):
        w = np.linalg.eigvalsh(hamiltonian(spec, v_of(s)).H)
        return (w[1] - w[0]) / max(1.0, abs(w[0]))

    out = optimize.minimize_scalar(relgap, bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-13})
    return float(out.x) if out.fun <= deg_rel_tol else None


def structure_sweep(spec: SystemSpec, family, params, n_points: int = 400,
                    seed: int = 0) -> list[dict]:
    """Classify family(p) for every parameter tuple p; sample and project
    the level-R cloud wherever the ground state is degenerate."""
    rows = []
    ss = np.random.SeedSequence(seed)
    children = ss.spawn(len(list(params)) if not isinstance(params, list) else len(params))
    params = list(params)
    for k, p in enumerate(params):
        v = np.asarray(family(*np.atleast_1d(p)), dtype=float)
        es, dc = ground_class(spec, v)
        row = {"params": list(np.atleast_1d(p).astype(float)),
               "g": es.degree, "kappa": dc.kappa, "points_projected": []}
        if es.degree >= 2:
            rng = np.random.default_rng(children[k])
            cloud = sample_DR(dc, n_points, rng)
            proj = barycentric_project(cloud.points, spec.M, spec.N)
            row["points_projected"] = proj.tolist()
        rows.append(row)
    return rows
