"""Region sampling and membership oracles.

Three nested density sets arise from one eigenspace: the image of real
unit coordinate vectors (level R), all two-point segments between such
images (level C, which equals the image of complex unit vectors), and the
full convex hull reached by ensembles.  Membership in the hull is an
exact convex problem over the PSD trace-one matrices; membership at level
C is a nonconvex search that is certified by a dense parameter grid for
g <= 3 and heuristic above.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .degmap import (DegeneracyClass, ensemble_coords, pair_order,
                     rho_of_x_many, _veronese_rows)
from .errors import DomainError

DEFAULT_MEMBER_TOL = 1e-7
DEFAULT_GRID_RES = 60


@dataclass(frozen=True)
class RegionSample:
    level: str                      # "R" | "C" | "ensemble"
    points: np.ndarray              # n x M densities
    params: dict
    class_ref: DegeneracyClass


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    residual: float
    witness: object
    tol: float
    certified: bool = True
    inconclusive: bool = False
    iterations: int = 0


def sample_DR(dc: DegeneracyClass, n: int, rng) -> RegionSample:
    """n images of uniformly random unit coordinate vectors."""
    if n < 1:
        raise DomainError("need n >= 1")
    X = rng.normal(size=(n, dc.g))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    return RegionSample("R", rho_of_x_many(dc, X), {"x": X}, dc)


def sample_DC(dc: DegeneracyClass, n: int, rng) -> RegionSample:
    """n segment points lam rho(x) + (1-lam) rho(y)."""
    if n < 1:
        raise DomainError("need n >= 1")
    X = rng.normal(size=(n, dc.g))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    Y = rng.normal(size=(n, dc.g))
    Y /= np.linalg.norm(Y, axis=1, keepdims=True)
    lam = rng.uniform(size=n)
    pts = lam[:, None] * rho_of_x_many(dc, X) + (1 - lam)[:, None] * rho_of_x_many(dc, Y)
    return RegionSample("C", pts, {"x": X, "y": Y, "lam": lam}, dc)


def sample_ensemble(dc: DegeneracyClass, n: int, rng) -> RegionSample:
    """n ensemble densities from random PSD trace-one matrices (Wishart-like)."""
    if n < 1:
        raise DomainError("need n >= 1")
    g = dc.g
    B = rng.normal(size=(n, g, g))
    A = np.einsum("bik,bjk->bij", B, B)
    A /= np.trace(A, axis1=1, axis2=2)[:, None, None]
    coords = np.stack([ensemble_coords(A[i], g) for i in range(n)])
    return RegionSample("ensemble", coords @ dc.P.T, {"A": A}, dc)


# ---------------------------------------------------------------------------
# hull membership: least squares over PSD trace-one matrices
# ---------------------------------------------------------------------------

def _project_spectrahedron(A: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {A PSD, tr A = 1}: eigenvalues onto simplex."""
    w, V = np.linalg.eigh(A)
    u = np.sort(w)[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, w.size + 1)
    k = ks[u - (css - 1) / ks > 0][-1]
    tau = (css[k - 1] - 1) / k
    lam = np.maximum(w - tau, 0.0)
    return (V * lam) @ V.T


def _grad_matrix(dc: DegeneracyClass, r: np.ndarray) -> np.ndarray:
    c = dc.P.T @ r
    g = dc.g
    G = np.diag(c[:g]).astype(float)
    for idx, (k, l) in enumerate(pair_order(g)):
        G[k, l] = G[l, k] = 0.5 * c[g + idx]
    return G


def _pure_state_polish(dc: DegeneracyClass, target: np.ndarray, x0: np.ndarray,
                       iters: int = 40) -> tuple[np.ndarray, float]:
    """Gauss-Newton for min_x |P nu(x) - target| on the unit sphere."""
    g = dc.g
    x = x0 / np.linalg.norm(x0)
    pairs = pair_order(g)
    best_x, best_r = x, np.inf
    for _ in range(iters):
        r = dc.P @ _veronese_rows(x[None, :])[0] - target
        rn = float(np.linalg.norm(r))
        if rn < best_r:
            best_x, best_r = x, rn
        Jnu = np.zeros((g + len(pairs), g))
        Jnu[np.arange(g), np.arange(g)] = 2 * x
        for idx, (k, l) in enumerate(pairs):
            Jnu[g + idx, k] = x[l]
            Jnu[g + idx, l] = x[k]
        J = dc.P @ Jnu
        # tangent step: remove the radial direction, small damping
        dx, *_ = np.linalg.lstsq(J.T @ J + 1e-12 * np.eye(g), -J.T @ r, rcond=None)
        dx -= (dx @ x) * x
        if np.linalg.norm(dx) < 1e-15:
            break
        x = x + dx
        x /= np.linalg.norm(x)
    return best_x, best_r


def membership_in_D(dc: DegeneracyClass, target, tol: float = DEFAULT_MEMBER_TOL,
                    max_iter: int = 20000) -> MembershipResult:
    """Distance from the target to the full region, with an ensemble witness.

    Accelerated projected gradient on f(A) = |rho(A) - target|^2 over the
    PSD trace-one set; a pure-state refinement is tried when the witness
    is numerically rank one (hull extreme points converge slowly).
    """
    t = np.asarray(target, dtype=float).reshape(-1)
    _check_target(dc, t)
    if tol <= 0:
        raise DomainError("tol must be positive")
    g = dc.g
    Lip = max(float(np.linalg.norm(dc.P, 2) ** 2), 1e-30)
    A = np.eye(g) / g
    Y = A.copy()
    tk = 1.0
    res_prev = np.linalg.norm(dc.P @ ensemble_coords(A, g) - t)
    res = res_prev
    it = 0
    for it in range(1, max_iter + 1):
        r = dc.P @ ensemble_coords(Y, g) - t
        Anew = _project_spectrahedron(Y - _grad_matrix(dc, r) / Lip)
        res_new = float(np.linalg.norm(dc.P @ ensemble_coords(Anew, g) - t))
        tknew = (1 + np.sqrt(1 + 4 * tk * tk)) / 2
        if res_new > res_prev:     # restart the momentum
            Y, tk = Anew, 1.0
        else:
            Y = Anew + ((tk - 1) / tknew) * (Anew - A)
            tk = tknew
        A, res_prev = Anew, res_new
        res = res_new
        if res <= 0.2 * tol:
            break
    witness = A
    if res > 0.2 * tol:
        ev, V = np.linalg.eigh(A)
        if ev[-1] >= 0.9:
            x, rpol = _pure_state_polish(dc, t, V[:, -1])
            if rpol < res:
                res = rpol
                witness = np.outer(x, x)
    member = res <= tol
    inconclusive = (not member) and res <= 10 * tol and it >= max_iter
    return MembershipResult(member, float(res), witness, tol,
                            certified=True, inconclusive=inconclusive, iterations=it)


# ---------------------------------------------------------------------------
# level-C membership: segment fit, multistart + grid certificate for g <= 3
# ---------------------------------------------------------------------------

def _best_lambda_residual(a: np.ndarray, b: np.ndarray, t: np.ndarray):
    """min over lam in [0,1] of |lam a + (1-lam) b - t| and its argmin."""
    u = a - b
    den = float(u @ u)
    lam = 0.0 if den < 1e-300 else float(np.clip((t - b) @ u / den, 0.0, 1.0))
    return float(np.linalg.norm(lam * a + (1 - lam) * b - t)), lam


def _segment_objective(dc: DegeneracyClass, t: np.ndarray):
    g = dc.g

    def f(z):
        x = z[:g]
        y = z[g:]
        nx, ny = np.linalg.norm(x), np.linalg.norm(y)
        if nx < 1e-12 or ny < 1e-12:
            return 1e6
        a = dc.P @ _veronese_rows((x / nx)[None, :])[0]
        b = dc.P @ _veronese_rows((y / ny)[None, :])[0]
        return _best_lambda_residual(a, b, t)[0]

    return f


def _sphere_grid(g: int, res: int) -> np.ndarray:
    """Deterministic dense grid on the unit sphere S^{g-1}, res points per angle."""
    if g == 2:
        phi = np.linspace(0.0, np.pi, res, endpoint=False)  # antipodal quotient
        return np.column_stack([np.cos(phi), np.sin(phi)])
    if g == 3:
        th = np.linspace(0.0, np.pi, res)
        ph = np.linspace(0.0, 2 * np.pi, 2 * res, endpoint=False)
        T, Ph = np.meshgrid(th, ph, indexing="ij")
        pts = np.column_stack([
            (np.sin(T) * np.cos(Ph)).ravel(),
            (np.sin(T) * np.sin(Ph)).ravel(),
            np.cos(T).ravel(),
        ])
        return np.unique(np.round(pts, 12), axis=0)
    raise DomainError(f"dense sphere grid only built for g <= 3, got g={g}")


def _grid_segment_min(dc: DegeneracyClass, t: np.ndarray, res: int):
    """Global grid search of the segment fit; returns (residual, x, y, lam)."""
    X = _sphere_grid(dc.g, res)
    R = rho_of_x_many(dc, X)           # n x M
    Umat = R - t[None, :]
    nrm2 = (Umat ** 2).sum(axis=1)
    n = R.shape[0]
    best = (np.inf, 0, 0, 0.0)
    chunk = max(1, int(4e6) // n)
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        C = Umat[lo:hi] @ Umat.T                       # (c, n)
        A2 = nrm2[lo:hi][:, None]
        B2 = nrm2[None, :]
        den = np.maximum(A2 + B2 - 2 * C, 1e-300)
        lam = np.clip((B2 - C) / den, 0.0, 1.0)
        val = (lam ** 2) * A2 + (1 - lam) ** 2 * B2 + 2 * lam * (1 - lam) * C
        val = np.maximum(val, 0.0)
        k = np.unravel_index(np.argmin(val), val.shape)
        if val[k] < best[0]:
            best = (float(val[k]), lo + k[0], k[1], float(lam[k]))
    d2, i, j, lam = best
    return np.sqrt(d2), X[i], X[j], lam


def membership_in_DC(dc: DegeneracyClass, target, tol: float = DEFAULT_MEMBER_TOL,
                     restarts: int = 16, grid_res: int = DEFAULT_GRID_RES,
                     rng=None) -> MembershipResult:
    """Best two-point segment fit lam rho(x) + (1-lam) rho(y) to the target.

    Multi-start local minimization always runs; for g <= 3 a dense grid
    over both spheres certifies non-membership, otherwise a non-member
    verdict is heuristic.
    """
    t = np.asarray(target, dtype=float).reshape(-1)
    _check_target(dc, t)
    rng = rng or np.random.default_rng(0)
    g = dc.g
    f = _segment_objective(dc, t)
    best = (np.inf, None)
    evals = 0
    starts = [np.concatenate([np.eye(g)[0], np.eye(g)[0]])]
    for _ in range(max(restarts - 1, 0)):
        starts.append(rng.normal(size=2 * g))
    certified = g <= 3
    if certified:
        rg, xg, yg, _ = _grid_segment_min(dc, t, grid_res)
        starts.append(np.concatenate([xg, yg]))
        best = (rg, np.concatenate([xg, yg]))
    for z0 in starts:
        out = optimize.minimize(f, z0, method="Nelder-Mead",
                                options={"maxiter": 400 * g, "fatol": 1e-14,
                                         "xatol": 1e-12})
        evals += out.nfev
        if out.fun < best[0]:
            best = (float(out.fun), out.x)
        if best[0] <= 0.2 * tol:
            break
    res, z = best
    x = z[:g] / np.linalg.norm(z[:g])
    y = z[g:] / np.linalg.norm(z[g:])
    a = dc.P @ _veronese_rows(x[None, :])[0]
    b = dc.P @ _veronese_rows(y[None, :])[0]
    res, lam = _best_lambda_residual(a, b, t)
    return MembershipResult(res <= tol, float(res), {"x": x, "y": y, "lam": lam},
                            tol, certified=certified, iterations=evals)


def membership_in_DR(dc: DegeneracyClass, target, tol: float = DEFAULT_MEMBER_TOL,
                     restarts: int = 16, rng=None) -> MembershipResult:
    """Best pure-real fit rho(x) to the target (level R)."""
    t = np.asarray(target, dtype=float).reshape(-1)
    _check_target(dc, t)
    rng = rng or np.random.default_rng(0)
    best_x, best_r = None, np.inf
    for k in range(restarts):
        x0 = np.eye(dc.g)[0] if k == 0 else rng.normal(size=dc.g)
        x, r = _pure_state_polish(dc, t, x0)
        if r < best_r:
            best_x, best_r = x, r
    return MembershipResult(best_r <= tol, float(best_r), best_x, tol,
                            certified=False)


def non_pure_check(dc: DegeneracyClass, tol: float = DEFAULT_MEMBER_TOL,
                   grid_res: int = DEFAULT_GRID_RES) -> dict:
    """Is the central density ensemble-reachable but not pure-state reachable?

    The algebraic condition (g >= 3 and kappa = 0) and the numerical
    confirmation are reported independently.
    """
    rho_bar = dc.central
    cond = dc.g >= 3 and dc.kappa == 0
    in_D = membership_in_D(dc, rho_bar, tol)
    in_DC = membership_in_DC(dc, rho_bar, tol, grid_res=grid_res)
    return {
        "condition_holds": cond,
        "in_D": in_D,
        "in_DC": in_DC,
        "confirmed": bool(in_D.member and not in_DC.member),
    }


# ---------------------------------------------------------------------------
# barycentric projection and exports
# ---------------------------------------------------------------------------

def helmert_basis(M: int) -> np.ndarray:
    """(M-1) x M orthonormal basis of the hyperplane {sum rho = const}.

    Row j (1-based) is proportional to (1,...,1, -j, 0,...,0)/sqrt(j(j+1))
    with j leading ones.
    """
    B = np.zeros((M - 1, M))
    for j in range(1, M):
        B[j - 1, :j] = 1.0
        B[j - 1, j] = -j
        B[j - 1] /= np.sqrt(j * (j + 1))
    return B


def barycentric_project(points, M: int, N: int) -> np.ndarray:
    """Coordinates of densities w.r.t. the Helmert basis, center at origin."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != M:
        raise DomainError(f"points have dimension {pts.shape[1]}, expected {M}")
    if np.abs(pts.sum(axis=1) - N).max() > 1e-8:
        raise DomainError("points are not normalized to the particle number")
    center = np.full(M, N / M)
    return (pts - center) @ helmert_basis(M).T


def _check_target(dc: DegeneracyClass, t: np.ndarray):
    if t.size != dc.M:
        raise DomainError(f"target has dimension {t.size}, expected {dc.M}")
    N = float(np.round(dc.central.sum()))
    if abs(t.sum() - N) > 1e-8:
        raise DomainError(f"target sums to {t.sum():g}, expected {N:g}")


def region_export_dict(sample: RegionSample, system: str, N: int) -> dict:
    proj = barycentric_project(sample.points, sample.class_ref.M, N)
    return {
        "system": system,
        "level": sample.level,
        "class": {"g": sample.class_ref.g, "kappa": sample.class_ref.kappa},
        "points": sample.points.tolist(),
        "projected": proj.tolist(),
    }


def region_export_csv(sample: RegionSample) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow([f"rho_{i+1}" for i in range(sample.class_ref.M)])
    for row in sample.points:
        w.writerow([f"{x:.17g}" for x in row])
    return buf.getvalue()
