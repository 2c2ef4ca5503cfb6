"""Render point clouds, sweep structures, functional surfaces, and ellipse
families from the exported JSON schemas.

Densities live on the hyperplane {sum rho = N}; the files carry projected
coordinates w.r.t. the orthonormal Helmert basis whose j-th vector is
proportional to (1,...,1, -j, 0,...,0)/sqrt(j(j+1)) with j leading ones,
centered on the uniform density.  The wireframe drawn behind every cloud
is the projection of the hypersimplex corners (0/1 vectors with N ones):
an octahedron for (M,N) = (4,2), a triangle for (3,2).

Rendering is a pure function of the input file for a fixed matplotlib
version (the Agg backend embeds no timestamps).
"""
from __future__ import annotations

import itertools
import json
import warnings

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


class SchemaError(ValueError):
    """Input file does not match the expected export schema."""


def helmert_basis(M: int) -> np.ndarray:
    B = np.zeros((M - 1, M))
    for j in range(1, M):
        B[j - 1, :j] = 1.0
        B[j - 1, j] = -j
        B[j - 1] /= np.sqrt(j * (j + 1))
    return B


def project(points: np.ndarray, M: int, N: int) -> np.ndarray:
    center = np.full(M, N / M)
    return (np.atleast_2d(points) - center) @ helmert_basis(M).T


def hypersimplex_corners(M: int, N: int) -> np.ndarray:
    """0/1 density vectors with N ones, in lexicographic subset order."""
    out = []
    for subset in itertools.combinations(range(M), N):
        c = np.zeros(M)
        c[list(subset)] = 1.0
        out.append(c)
    return np.array(out)


def wireframe_corners(M: int, N: int) -> np.ndarray:
    """Projected corner coordinates of the density domain."""
    return project(hypersimplex_corners(M, N), M, N)


def hypersimplex_edges(M: int, N: int) -> list[tuple[int, int]]:
    """Corner pairs at minimal nonzero distance (the domain's edges)."""
    corners = hypersimplex_corners(M, N)
    n = len(corners)
    d = np.linalg.norm(corners[:, None, :] - corners[None, :, :], axis=2)
    pos = d[d > 1e-12]
    dmin = pos.min()
    return [(i, j) for i in range(n) for j in range(i + 1, n)
            if abs(d[i, j] - dmin) < 1e-9]


def _require(data, keys, kind):
    missing = [k for k in keys if k not in data]
    if missing:
        raise SchemaError(f"{kind} input is missing keys {missing}")


def _draw_wireframe(ax, M, N, three_d):
    corners = wireframe_corners(M, N)
    for i, j in hypersimplex_edges(M, N):
        seg = corners[[i, j]]
        if three_d:
            ax.plot(seg[:, 0], seg[:, 1], seg[:, 2], color="0.6", lw=0.8)
        else:
            ax.plot(seg[:, 0], seg[:, 1], color="0.6", lw=0.8)


def _new_axes(three_d):
    fig = plt.figure(figsize=(6, 6), dpi=110)
    if three_d:
        ax = fig.add_subplot(111, projection="3d")
        ax.set_box_aspect((1, 1, 1))
    else:
        ax = fig.add_subplot(111)
        ax.set_aspect("equal")
    ax.set_axis_off()
    return fig, ax


def _infer_mn(dim: int, N: int | None) -> tuple[int, int]:
    return dim + 1, 2 if N is None else N


def render_cloud3d(data: dict, out_path: str, N: int | None = None):
    _require(data, ["level", "points", "projected"], "cloud3d")
    pts = np.asarray(data["projected"], dtype=float)
    raw = np.asarray(data["points"], dtype=float)
    if pts.size == 0:
        warnings.warn("empty point cloud; writing an empty frame")
        fig, ax = _new_axes(True)
        fig.savefig(out_path)
        plt.close(fig)
        return
    M = raw.shape[1]
    n_part = int(round(raw[0].sum()))
    three_d = pts.shape[1] >= 3
    fig, ax = _new_axes(three_d)
    _draw_wireframe(ax, M, n_part, three_d)
    if three_d:
        ax.scatter(pts[:, 0], pts[:, 1], pts[:, 2], s=2.0, c="#1f3b73",
                   alpha=0.5, linewidths=0)
    else:
        ax.scatter(pts[:, 0], pts[:, 1], s=3.0, c="#1f3b73", alpha=0.6,
                   linewidths=0)
    ax.set_title(f"{data.get('system', '')} level {data['level']}")
    fig.savefig(out_path)
    plt.close(fig)


def _sweep_rows(data):
    if not isinstance(data, list):
        raise SchemaError("structure3d/ellipses input must be a list of entries")
    for row in data:
        _require(row, ["params", "g", "kappa", "points_projected"], "sweep entry")
    return data


def render_structure3d(data, out_path: str, N: int | None = None):
    rows = _sweep_rows(data)
    clouds = [np.asarray(r["points_projected"], dtype=float) for r in rows]
    filled = [c for c in clouds if c.size]
    if not filled:
        warnings.warn("no degenerate entries in sweep; writing an empty frame")
        fig, ax = _new_axes(True)
        fig.savefig(out_path)
        plt.close(fig)
        return
    dim = filled[0].shape[1]
    M, n_part = _infer_mn(dim, N)
    three_d = dim >= 3
    fig, ax = _new_axes(three_d)
    _draw_wireframe(ax, M, n_part, three_d)
    cmap = plt.get_cmap("viridis")
    for k, (row, c) in enumerate(zip(rows, clouds)):
        if not c.size:
            continue
        color = cmap(k / max(len(rows) - 1, 1))
        if three_d:
            ax.scatter(c[:, 0], c[:, 1], c[:, 2], s=1.5, color=color,
                       alpha=0.45, linewidths=0)
        else:
            ax.scatter(c[:, 0], c[:, 1], s=2.0, color=color, alpha=0.5,
                       linewidths=0)
    fig.savefig(out_path)
    plt.close(fig)


def render_ellipses(data, out_path: str, N: int | None = None):
    rows = _sweep_rows(data)
    clouds = [np.asarray(r["points_projected"], dtype=float) for r in rows if
              len(r["points_projected"])]
    if not clouds:
        warnings.warn("no curves to draw; writing an empty frame")
        fig, ax = _new_axes(True)
        fig.savefig(out_path)
        plt.close(fig)
        return
    dim = clouds[0].shape[1]
    M, n_part = _infer_mn(dim, N)
    three_d = dim >= 3
    fig, ax = _new_axes(three_d)
    _draw_wireframe(ax, M, n_part, three_d)
    cmap = plt.get_cmap("plasma")
    for k, c in enumerate(clouds):
        loop = np.vstack([c, c[:1]])
        color = cmap(k / max(len(clouds) - 1, 1))
        if three_d:
            ax.plot(loop[:, 0], loop[:, 1], loop[:, 2], color=color, lw=1.0)
        else:
            ax.plot(loop[:, 0], loop[:, 1], color=color, lw=1.0)
    fig.savefig(out_path)
    plt.close(fig)


def render_surface3d(data: dict, out_path: str, N: int | None = None):
    _require(data, ["plane", "grid"], "surface3d")
    rows = data["grid"]
    good = [r for r in rows if r.get("in_domain") and r.get("F") is not None]
    if not good:
        warnings.warn("no in-domain grid values; writing an empty frame")
        fig, ax = _new_axes(True)
        fig.savefig(out_path)
        plt.close(fig)
        return
    ab = np.array([r["ab"] for r in good], dtype=float)
    F = np.array([r["F"] for r in good], dtype=float)
    fig = plt.figure(figsize=(6.5, 6), dpi=110)
    ax = fig.add_subplot(111, projection="3d")
    ax.plot_trisurf(ab[:, 0], ab[:, 1], -F, cmap="viridis", linewidth=0.1)
    ax.set_xlabel("a")
    ax.set_ylabel("b")
    ax.set_zlabel("-F")
    ax.set_title(data.get("system", ""))
    fig.savefig(out_path)
    plt.close(fig)


_KINDS = {
    "cloud3d": render_cloud3d,
    "structure3d": render_structure3d,
    "surface3d": render_surface3d,
    "ellipses": render_ellipses,
}


def render(kind: str, in_path: str, out_path: str, N: int | None = None):
    if kind not in _KINDS:
        raise SchemaError(f"unknown kind {kind!r}; choose from {sorted(_KINDS)}")
    with open(in_path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    _KINDS[kind](data, out_path, N=N)
