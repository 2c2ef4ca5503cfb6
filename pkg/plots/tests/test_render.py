import itertools
import json
import warnings
from pathlib import Path

import numpy as np
import pytest

from degeo_plots import (SchemaError, hypersimplex_edges, render,
                         wireframe_corners)

FIX = Path(__file__).parent / "fixtures"

KINDS = [
    ("cloud3d", "cloud_tetrahedron.json"),
    ("structure3d", "sweep_tetrahedron.json"),
    ("surface3d", "fsurface_square.json"),
    ("ellipses", "ellipses_square.json"),
]


@pytest.mark.parametrize("kind,fixture", KINDS)
def test_render_all_kinds(kind, fixture, tmp_path):
    out = tmp_path / f"{kind}.png"
    render(kind, str(FIX / fixture), str(out))
    assert out.exists()
    assert out.stat().st_size > 2000


@pytest.mark.parametrize("kind,fixture", KINDS)
def test_render_deterministic_bytes(kind, fixture, tmp_path):
    a = tmp_path / "a.png"
    b = tmp_path / "b.png"
    render(kind, str(FIX / fixture), str(a))
    render(kind, str(FIX / fixture), str(b))
    assert a.read_bytes() == b.read_bytes()


def _reference_projection(corners, M, N):
    # independent restatement of the documented Helmert projection
    B = np.zeros((M - 1, M))
    for j in range(1, M):
        B[j - 1, :j] = 1.0
        B[j - 1, j] = -j
        B[j - 1] /= np.sqrt(j * (j + 1))
    return (corners - N / M) @ B.T


@pytest.mark.parametrize("M,N", [(3, 2), (4, 2), (5, 2)])
def test_wireframe_corners_match_documented_projection(M, N):
    got = wireframe_corners(M, N)
    corners = np.array([
        [1.0 if i in sub else 0.0 for i in range(M)]
        for sub in itertools.combinations(range(M), N)
    ])
    want = _reference_projection(corners, M, N)
    assert np.abs(got - want).max() <= 1e-12


def test_octahedron_wireframe_shape():
    corners = wireframe_corners(4, 2)
    assert corners.shape == (6, 3)
    # all corners equidistant from the origin, twelve octahedron edges
    r = np.linalg.norm(corners, axis=1)
    assert np.abs(r - r[0]).max() < 1e-12
    assert len(hypersimplex_edges(4, 2)) == 12
    assert len(hypersimplex_edges(3, 2)) == 3


def test_schema_mismatch_is_descriptive(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"level": "R"}))
    with pytest.raises(SchemaError) as exc:
        render("cloud3d", str(bad), str(tmp_path / "x.png"))
    assert "points" in str(exc.value)
    with pytest.raises(SchemaError):
        render("nosuchkind", str(FIX / "cloud_tetrahedron.json"),
               str(tmp_path / "y.png"))


def test_empty_cloud_warns_and_writes_frame(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"system": "x", "level": "R", "points": [],
                                 "projected": []}))
    out = tmp_path / "empty.png"
    with pytest.warns(UserWarning):
        render("cloud3d", str(empty), str(out))
    assert out.exists() and out.stat().st_size > 500


def test_cli_roundtrip(tmp_path):
    from degeo_plots.cli import main
    out = tmp_path / "fig.png"
    code = main(["render", "--kind", "cloud3d",
                 "--in", str(FIX / "cloud_tetrahedron.json"),
                 "--out", str(out)])
    assert code == 0 and out.exists()
    assert main(["render", "--kind", "cloud3d", "--in",
                 str(tmp_path / "missing.json"), "--out", str(out)]) == 2
