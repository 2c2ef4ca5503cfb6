import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from degeo import (CatalogError, DomainError, Graph, Potential, add_potential,
                   dump_graph, graph_names, laplacian, named_graph, parse_graph)

CATALOG_SIZES = {
    "triangle": (3, 3),
    "square": (4, 4),
    "tetrahedron": (4, 6),
    "claw": (4, 3),
    "diamond": (4, 5),
    "octahedron": (6, 12),
    "cube": (8, 12),
    "cuboctahedron": (12, 24),
    "icosahedron": (12, 30),
    "dodecahedron": (20, 30),
}


@pytest.mark.parametrize("name,sizes", CATALOG_SIZES.items())
def test_catalog_sizes(name, sizes):
    g = named_graph(name)
    assert (g.M, len(g.edges)) == sizes


@pytest.mark.parametrize("name,degree", [
    ("tetrahedron", 3), ("square", 2), ("triangle", 2),
    ("octahedron", 4), ("cube", 3), ("cuboctahedron", 4),
    ("icosahedron", 5), ("dodecahedron", 3),
])
def test_catalog_regularity(name, degree):
    h = laplacian(named_graph(name)).h
    assert np.allclose(np.diag(h), degree)


def test_unknown_name_lists_catalog():
    with pytest.raises(CatalogError) as exc:
        named_graph("heptagon")
    for name in graph_names():
        assert name in str(exc.value)


def test_laplacian_tetrahedron_matrix():
    h = laplacian(named_graph("tetrahedron")).h
    expected = 4 * np.eye(4) - np.ones((4, 4))
    assert np.array_equal(h, expected)


def test_laplacian_single_edge():
    g = Graph(2, ((1, 2, 1.0),))
    assert np.array_equal(laplacian(g).h, [[1.0, -1.0], [-1.0, 1.0]])


def test_laplacian_edgeless():
    assert np.array_equal(laplacian(Graph(3, ())).h, np.zeros((3, 3)))


@st.composite
def graphs(draw):
    M = draw(st.integers(min_value=1, max_value=7))
    all_pairs = [(i, j) for i in range(1, M + 1) for j in range(i + 1, M + 1)]
    chosen = draw(st.lists(st.sampled_from(all_pairs), unique=True, max_size=len(all_pairs))
                  if all_pairs else st.just([]))
    ws = draw(st.lists(st.floats(0.1, 5.0), min_size=len(chosen), max_size=len(chosen)))
    return Graph(M, tuple((i, j, w) for (i, j), w in zip(chosen, ws)))


@given(graphs())
@settings(max_examples=60, deadline=None)
def test_laplacian_symmetric_zero_rowsum(g):
    h = laplacian(g).h
    assert np.array_equal(h, h.T)
    assert np.abs(h.sum(axis=1)).max() < 1e-12


@given(graphs(), st.floats(-3, 3))
@settings(max_examples=40, deadline=None)
def test_add_potential_gauge_commutes(g, c):
    h = laplacian(g)
    rng = np.random.default_rng(0)
    v = rng.normal(size=g.M)
    a = add_potential(h, Potential(v + c)).h
    b = add_potential(h, Potential(v)).h + c * np.eye(g.M)
    assert np.allclose(a, b, atol=1e-12)


def test_add_potential_examples():
    h0 = laplacian(named_graph("tetrahedron"))
    assert np.array_equal(add_potential(h0, Potential(np.zeros(4))).h, h0.h)
    hp = add_potential(h0, Potential([0.7, 0, 0, 0])).h
    assert hp[0, 0] == 3 + 0.7
    assert np.array_equal(hp - np.diag([0.7, 0, 0, 0]), h0.h)


def test_add_potential_dimension_mismatch():
    with pytest.raises(DomainError):
        add_potential(laplacian(named_graph("triangle")), Potential(np.zeros(4)))


def test_negative_weight_rejected():
    with pytest.raises(DomainError):
        Graph(2, ((1, 2, -1.0),))


def test_duplicate_edge_rejected():
    with pytest.raises(DomainError):
        Graph(3, ((1, 2, 1.0), (1, 2, 2.0)))


def test_self_loop_rejected():
    with pytest.raises(DomainError):
        Graph(3, ((2, 2, 1.0),))


def test_sum_zero_gauge():
    p = Potential([1.0, 2.0, 3.0]).sum_zero()
    assert abs(p.v.sum()) < 1e-12
    with pytest.raises(DomainError):
        Potential([1.0, 1.0], gauge="sum-zero")


def test_graph_file_roundtrip():
    g = named_graph("diamond")
    text = dump_graph(g)
    g2 = parse_graph(text)
    assert g2 == g


def test_graph_file_comments_and_weights():
    text = "# a diamond\n4\n1 2\n1 3 2.5  # weighted\n2 3\n"
    g = parse_graph(text)
    assert g.M == 4
    assert g.edges == ((1, 2, 1.0), (1, 3, 2.5), (2, 3, 1.0))


def test_graph_file_bad_header():
    with pytest.raises(DomainError):
        parse_graph("x y\n1 2\n")
