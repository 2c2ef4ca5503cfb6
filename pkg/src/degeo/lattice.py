"""Graphs and one-body operators.

A system lives on a finite graph with M vertices.  The fixed one-body part
is the weighted graph Laplacian h = D - A; a scalar potential enters as a
diagonal addition.  Vertex indices are 1-based in every interface (edge
lists, files, catalog docs) and 0-based internally.

Named graph catalog (all unit weight, numbering fixed so that factor
vectors are reproducible):

    triangle       K3; vertices 1..3, all pairs.
    square         C4; cycle 1-2-3-4-1.
    tetrahedron    K4; vertices 1..4, all pairs.
    claw           star K_{1,3}; center 1, leaves 2..4.
    diamond        K4 minus the edge (3,4).
    octahedron     K_{2,2,2}; antipodal pairs (1,2), (3,4), (5,6),
                   edges between all non-antipodal pairs.
    cube           Q3; vertex i+1 is the bit string of i (i = 0..7,
                   vertex 1 = 000, ..., vertex 8 = 111), edges between
                   strings at Hamming distance 1.
    cuboctahedron  vertices 1..12 are the coordinate triples
                   (+-1,+-1,0), (+-1,0,+-1), (0,+-1,+-1) in ascending
                   lexicographic order; edges between triples at squared
                   Euclidean distance 2.
    icosahedron    vertices 1..12 are the cyclic triples (0,+-1,+-p),
                   (+-1,+-p,0), (+-p,0,+-1) with p the golden ratio, in
                   ascending lexicographic order; edges at minimal
                   distance 2.
    dodecahedron   vertices 1..20 are (+-1,+-1,+-1), (0,+-1/p,+-p),
                   (+-1/p,+-p,0), (+-p,0,+-1/p) in ascending lexicographic
                   order; edges at minimal distance 2/p.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CatalogError, DomainError

GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph: vertex count and 1-based edge list."""

    M: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if self.M < 1:
            raise DomainError(f"vertex count must be >= 1, got {self.M}")
        seen = set()
        for i, j, w in self.edges:
            if not (1 <= i < j <= self.M):
                raise DomainError(f"edge ({i},{j}) violates 1 <= i < j <= M={self.M}")
            if (i, j) in seen:
                raise DomainError(f"duplicate edge ({i},{j})")
            if w < 0:
                raise DomainError(f"negative edge weight {w} on ({i},{j})")
            seen.add((i, j))


@dataclass(frozen=True)
class OneBodyOperator:
    """M x M real symmetric matrix acting on vertex amplitudes."""

    h: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise DomainError(f"one-body operator must be square, got {h.shape}")
        object.__setattr__(self, "h", h)

    @property
    def M(self) -> int:
        return self.h.shape[0]


@dataclass(frozen=True)
class Potential:
    """Scalar on-site potential with its gauge convention.

    gauge="sum-zero" pins the additive constant by sum(v) = 0; "raw"
    leaves it free.
    """

    v: np.ndarray
    gauge: str = "raw"

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float).reshape(-1)
        if self.gauge not in ("raw", "sum-zero"):
            raise DomainError(f"unknown gauge {self.gauge!r}")
        if self.gauge == "sum-zero" and abs(v.sum()) > 1e-12 * max(1.0, np.abs(v).max()):
            raise DomainError(f"sum-zero potential sums to {v.sum():g}")
        object.__setattr__(self, "v", v)

    @property
    def M(self) -> int:
        return self.v.size

    def sum_zero(self) -> "Potential":
        """Equivalent potential in the sum-zero gauge."""
        return Potential(self.v - self.v.mean(), gauge="sum-zero")


def _complete(M):
    return [(i, j) for i in range(1, M + 1) for j in range(i + 1, M + 1)]


def _from_coords(coords, dist2, label):
    coords = sorted(coords)
    edges = []
    n = len(coords)
    for a in range(n):
        for b in range(a + 1, n):
            d2 = sum((coords[a][k] - coords[b][k]) ** 2 for k in range(3))
            if abs(d2 - dist2) < 1e-9:
                edges.append((a + 1, b + 1))
    return edges


def _cuboctahedron_edges():
    coords = []
    for sa in (1.0, -1.0):
        for sb in (1.0, -1.0):
            coords += [(sa, sb, 0.0), (sa, 0.0, sb), (0.0, sa, sb)]
    return 12, _from_coords(coords, 2.0, "cuboctahedron")


def _icosahedron_edges():
    p = GOLDEN
    coords = []
    for sa in (1.0, -1.0):
        for sb in (1.0, -1.0):
            coords += [(0.0, sa, sb * p), (sa, sb * p, 0.0), (sa * p, 0.0, sb)]
    return 12, _from_coords(coords, 4.0, "icosahedron")


def _dodecahedron_edges():
    p = GOLDEN
    q = 1.0 / p
    coords = [(sa, sb, sc) for sa in (1.0, -1.0) for sb in (1.0, -1.0) for sc in (1.0, -1.0)]
    for sa in (1.0, -1.0):
        for sb in (1.0, -1.0):
            coords += [(0.0, sa * q, sb * p), (sa * q, sb * p, 0.0), (sa * p, 0.0, sb * q)]
    return 20, _from_coords(coords, (2.0 * q) ** 2, "dodecahedron")


def _catalog():
    cat = {
        "triangle": (3, _complete(3)),
        "square": (4, [(1, 2), (2, 3), (3, 4), (1, 4)]),
        "tetrahedron": (4, _complete(4)),
        "claw": (4, [(1, 2), (1, 3), (1, 4)]),
        "diamond": (4, [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4)]),
        "octahedron": (6, [(i, j) for i, j in _complete(6)
                           if {i, j} not in ({1, 2}, {3, 4}, {5, 6})]),
        "cube": (8, [(i + 1, j + 1) for i in range(8) for j in range(i + 1, 8)
                     if bin(i ^ j).count("1") == 1]),
    }
    cat["cuboctahedron"] = _cuboctahedron_edges()
    cat["icosahedron"] = _icosahedron_edges()
    cat["dodecahedron"] = _dodecahedron_edges()
    return cat


_CATALOG = _catalog()


def named_graph(name: str) -> Graph:
    """Unit-weight graph from the catalog documented in the module header."""
    try:
        M, edges = _CATALOG[name]
    except KeyError:
        valid = ", ".join(sorted(_CATALOG))
        raise CatalogError(f"unknown graph {name!r}; valid names: {valid}") from None
    return Graph(M, tuple((i, j, 1.0) for i, j in edges))


def graph_names() -> tuple[str, ...]:
    return tuple(sorted(_CATALOG))


def laplacian(g: Graph) -> OneBodyOperator:
    """Weighted graph Laplacian h = D - A (zero row sums, symmetric)."""
    h = np.zeros((g.M, g.M))
    for i, j, w in g.edges:
        a, b = i - 1, j - 1
        h[a, a] += w
        h[b, b] += w
        h[a, b] -= w
        h[b, a] -= w
    return OneBodyOperator(h)


def add_potential(h: OneBodyOperator, v: Potential) -> OneBodyOperator:
    """h + diag(v)."""
    if v.M != h.M:
        raise DomainError(f"potential length {v.M} != operator size {h.M}")
    return OneBodyOperator(h.h + np.diag(v.v))


def parse_graph(text: str) -> Graph:
    """Parse the text format: first line M, then `i j [w]` lines, # comments."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise DomainError("empty graph file")
    try:
        M = int(lines[0])
    except ValueError:
        raise DomainError(f"first line must be the vertex count, got {lines[0]!r}") from None
    edges = []
    for line in lines[1:]:
        parts = line.split()
        if len(parts) not in (2, 3):
            raise DomainError(f"bad edge line {line!r}")
        i, j = int(parts[0]), int(parts[1])
        w = float(parts[2]) if len(parts) == 3 else 1.0
        if i > j:
            i, j = j, i
        edges.append((i, j, w))
    return Graph(M, tuple(edges))


def load_graph(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())


def dump_graph(g: Graph) -> str:
    lines = [str(g.M)]
    lines += [f"{i} {j} {w:.17g}" for i, j, w in g.edges]
    return "\n".join(lines) + "\n"
