import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from skelfac.geometry import (
    Box, arc_points, plates3d, random_points, segment_probe_points, segments_geometry,
    segments_with_spheres, side_by_side_squares, squares2d, two_arcs_geometry, uniform_grid,
)


def test_box_rejects_bad_bounds():
    with pytest.raises(ValueError):
        Box((1.0,), (0.0,))
    with pytest.raises(ValueError):
        Box((0.0, 0.0), (0.0, 0.0))
    with pytest.raises(ValueError):
        Box((0, 0, 0, 0), (1, 1, 1, 1))


def test_box_flat_dimension_allowed():
    b = Box((0.0, -1.0), (1.0, -1.0))
    assert b.dim == 2
    np.testing.assert_allclose(b.midpoint, [0.5, -1.0])


def test_uniform_grid_examples():
    assert uniform_grid(Box((0, 0), (1, 1)), (50, 50)).shape == (2500, 2)
    np.testing.assert_array_equal(uniform_grid(Box((0.0,), (1.0,)), (1,))[:, 0], [0.5])
    np.testing.assert_allclose(uniform_grid(Box((0.0,), (2.0,)), (3,))[:, 0], [0, 1, 2])


def test_uniform_grid_bad_counts():
    with pytest.raises(ValueError):
        uniform_grid(Box((0.0,), (1.0,)), (0,))
    with pytest.raises(ValueError):
        uniform_grid(Box((0, 0), (1, 1)), (3,))


@settings(max_examples=40, deadline=None)
@given(
    lo=st.lists(st.floats(-5, 5), min_size=1, max_size=3),
    widths=st.lists(st.floats(0.01, 3), min_size=3, max_size=3),
    counts=st.lists(st.integers(1, 6), min_size=3, max_size=3),
)
def test_uniform_grid_inside_box(lo, widths, counts):
    d = len(lo)
    box = Box(tuple(lo), tuple(a + w for a, w in zip(lo, widths[:d])))
    pts = uniform_grid(box, counts[:d])
    assert len(pts) == np.prod(counts[:d])
    assert box.contains(pts).all()


def test_random_points_examples():
    box = Box((0, 0), (1, 1))
    p = random_points(box, 500, seed=7)
    assert p.shape == (500, 2)
    assert len(np.unique(p, axis=0)) == 500
    assert box.contains(p).all()
    np.testing.assert_array_equal(p, random_points(box, 500, seed=7))
    # points come from the 100 x 100 grid
    np.testing.assert_allclose(p * 99, np.round(p * 99), atol=1e-9)
    with pytest.raises(ValueError):
        random_points(box, 0, seed=1)
    with pytest.raises(ValueError):
        random_points(box, 10001, seed=1)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(1, 200))
def test_random_points_deterministic(seed, n):
    box = Box((1.0, 2.0), (2.0, 3.0))
    a = random_points(box, n, seed)
    np.testing.assert_array_equal(a, random_points(box, n, seed))
    assert box.contains(a).all()


def test_arc_points_examples():
    p = arc_points((0, 0), 1.0, 0.0, np.pi / 2, 2)
    np.testing.assert_allclose(p, [[1, 0], [0, 1]], atol=1e-15)
    np.testing.assert_allclose(arc_points((1, 1), 2.0, 0.3, 1.0, 1), [[1 + 2 * np.cos(0.3), 1 + 2 * np.sin(0.3)]])
    with pytest.raises(ValueError):
        arc_points((0, 0), 1.0, 1.0, 0.0, 3)
    with pytest.raises(ValueError):
        arc_points((0, 0), 1.0, 0.0, 1.0, 0)


def test_two_arcs_geometry():
    X, Y = two_arcs_geometry()
    assert X.shape == Y.shape == (100, 2)
    rx, ry = np.linalg.norm(X, axis=1), np.linalg.norm(Y, axis=1)
    np.testing.assert_allclose(ry / rx, 0.9)
    # each arc spans pi/4 in angle
    ang = np.arctan2(X[:50, 1], X[:50, 0])
    assert np.isclose(ang.max() - ang.min(), np.pi / 4)
    # X1 faces Y1 (right), X2 faces Y2 (left)
    assert (X[:50, 0] > 0).all() and (X[50:, 0] < 0).all()
    assert (Y[:50, 0] > 0).all() and (Y[50:, 0] < 0).all()


@pytest.mark.parametrize("N", [1, 7, 200])
def test_segments_with_spheres_sizes(N):
    X, Y = segments_with_spheres(N)
    assert X.shape == Y.shape == (26 * N, 3)


def test_segments_with_spheres_layout():
    N = 20
    eps, xs, ys, xc, yc = segments_geometry(N)
    X, Y = segments_with_spheres(N)
    # segments: unit length on the x axis, facing ends 3 eps apart
    np.testing.assert_allclose(X[:N, 0], np.linspace(xs[0], xs[1], N))
    assert np.isclose(xs[1] - xs[0], 1.0) and np.isclose(ys[1] - ys[0], 1.0)
    assert np.allclose(X[:N, 1:], 0) and np.allclose(Y[:N, 1:], 0)
    # balls of diameter eps at the near ends, a gap of eps between them
    assert (np.linalg.norm(X[N:] - [xc, 0, 0], axis=1) <= eps / 2 + 1e-15).all()
    assert (np.linalg.norm(Y[N:] - [yc, 0, 0], axis=1) <= eps / 2 + 1e-15).all()
    assert np.isclose((yc - eps / 2) - (xc + eps / 2), eps)
    # every ball point is within 1/N of its segment endpoint
    assert (np.linalg.norm(X[N:] - [xs[1], 0, 0], axis=1) <= eps + 1e-15).all()
    assert (np.linalg.norm(Y[N:] - [ys[0], 0, 0], axis=1) <= eps + 1e-15).all()
    a, b = segments_with_spheres(N)
    np.testing.assert_array_equal(a, X)
    np.testing.assert_array_equal(b, Y)


def test_segment_probe_points():
    Xp, Yp = segment_probe_points(200, 10000)
    _, xs, ys, _, _ = segments_geometry(200)
    assert Xp.shape == (10000, 3)
    assert np.isclose(Xp[0, 0], xs[0]) and np.isclose(Yp[-1, 0], ys[1])


def test_named_geometries():
    bx, by = squares2d()
    np.testing.assert_allclose(bx.midpoint, [0.5, 0.5])
    np.testing.assert_allclose(by.midpoint, [2.5, 2.5])
    px, py = plates3d()
    assert px.lo[0] == px.hi[0] and py.lo[2] == py.hi[2]
    sx, sy = side_by_side_squares(0.25)
    assert sy.lo[0] - sx.hi[0] == 0.25
