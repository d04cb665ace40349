"""Axis-aligned boxes and the point-set generators used by the experiments.

Point sets are plain ``(n, d)`` float arrays throughout the package.
"""

from dataclasses import dataclass

import numpy as np

# Fixed seed for the sphere fill of ``segments_with_spheres``.
SPHERE_SEED = 20180701

# 3D plates geometry: two perpendicular 1 x 1.5 rectangles.
PLATE_X = ((-1.0, -1.0), (0.0, 1.0), (0.0, 1.5))
PLATE_Y = ((0.0, 1.5), (0.0, 1.0), (-1.0, -1.0))


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``[lo_0, hi_0] x ... x [lo_{d-1}, hi_{d-1}]``.

    A dimension with ``lo == hi`` is *flat*: the box is a lower-dimensional
    face embedded in R^d (used for the plates geometry).
    """

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        if len(lo) != len(hi):
            raise ValueError("lo and hi must have the same length")
        if not 1 <= len(lo) <= 3:
            raise ValueError(f"only 1 to 3 dimensions are supported, got {len(lo)}")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError(f"invalid box bounds lo={lo}, hi={hi}")
        if all(a == b for a, b in zip(lo, hi)):
            raise ValueError("box is a single point")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_bounds(cls, *bounds):
        """``Box.from_bounds((0, 1), (2, 3))`` -> ``[0,1] x [2,3]``."""
        return cls(tuple(b[0] for b in bounds), tuple(b[1] for b in bounds))

    @property
    def dim(self):
        return len(self.lo)

    @property
    def midpoint(self):
        return (np.array(self.lo) + np.array(self.hi)) / 2

    @property
    def widths(self):
        return np.array(self.hi) - np.array(self.lo)

    def contains(self, points, atol=1e-12):
        p = np.atleast_2d(points)
        return np.all((p >= np.array(self.lo) - atol) & (p <= np.array(self.hi) + atol), axis=1)


def as_points(points, dim=None):
    """Coerce to a nonempty ``(n, d)`` float array."""
    p = np.asarray(points, dtype=float)
    if p.ndim == 1:
        p = p[:, None] if dim in (None, 1) else p[None, :]
    if p.ndim != 2 or p.shape[0] == 0:
        raise ValueError("point set must be a nonempty (n, d) array")
    if dim is not None and p.shape[1] != dim:
        raise ValueError(f"expected {dim}-dimensional points, got {p.shape[1]}")
    return p


def _check_counts(box, counts):
    counts = tuple(int(c) for c in np.atleast_1d(counts))
    if len(counts) != box.dim:
        raise ValueError(f"need {box.dim} counts, got {len(counts)}")
    if any(c < 1 for c in counts):
        raise ValueError(f"counts must be >= 1, got {counts}")
    return counts


def tensor_points(axes):
    """Lexicographic tensor product of 1D coordinate arrays (first axis slowest)."""
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


def uniform_grid(box, counts):
    """Equispaced tensor grid including the box endpoints.

    A count of 1 places the single point at the midpoint of that dimension.
    """
    counts = _check_counts(box, counts)
    axes = []
    for lo, hi, c in zip(box.lo, box.hi, counts):
        axes.append(np.array([(lo + hi) / 2]) if c == 1 else np.linspace(lo, hi, c))
    return tensor_points(axes)


def random_points(box, n, seed, grid_counts=None):
    """Deterministic uniform subsample of ``n`` distinct points of a uniform grid.

    The grid defaults to 100 points per non-flat dimension, as in the
    side-by-side squares comparison.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if grid_counts is None:
        grid_counts = tuple(1 if lo == hi else 100 for lo, hi in zip(box.lo, box.hi))
    grid = uniform_grid(box, grid_counts)
    if n > len(grid):
        raise ValueError(f"cannot draw {n} distinct points from a grid of {len(grid)}")
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(grid), size=n, replace=False)
    return grid[idx]


def arc_points(center, radius, angle_lo, angle_hi, n):
    """``n`` points equispaced in angle on a circular arc (``n == 1`` -> ``angle_lo``)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not angle_lo < angle_hi:
        raise ValueError("need angle_lo < angle_hi")
    theta = np.array([angle_lo]) if n == 1 else np.linspace(angle_lo, angle_hi, n)
    c = np.asarray(center, dtype=float)
    return np.stack([c[0] + radius * np.cos(theta), c[1] + radius * np.sin(theta)], axis=1)


def two_arcs_geometry(n=50, half_width=1.0, ratio=0.9, angle=np.pi / 4):
    """Four concentric arcs: X = [X1, X2] on radius ``half_width``, Y = [Y1, Y2]
    on radius ``ratio * half_width``.

    X1/Y1 face each other on the right, X2/Y2 on the left, so the kernel
    matrix of a fast-decaying kernel is nearly block diagonal.
    """
    a = angle / 2
    rx, ry = half_width, ratio * half_width
    X1 = arc_points((0.0, 0.0), rx, -a, a, n)
    Y1 = arc_points((0.0, 0.0), ry, -a, a, n)
    X2 = arc_points((0.0, 0.0), rx, np.pi - a, np.pi + a, n)
    Y2 = arc_points((0.0, 0.0), ry, np.pi - a, np.pi + a, n)
    return np.vstack([X1, X2]), np.vstack([Y1, Y2])


def _fill_ball(rng, center, radius, count):
    out = np.empty((0, 3))
    while len(out) < count:
        cand = rng.uniform(-radius, radius, size=(2 * count, 3))
        cand = cand[np.einsum("ij,ij->i", cand, cand) <= radius * radius]
        out = np.vstack([out, cand])
    return np.asarray(center) + out[:count]


def segments_geometry(N):
    """Layout constants of the segments-with-spheres benchmark.

    Returns ``(eps, x_segment, y_segment, x_center, y_center)`` where the
    segments are ``(start, end)`` x-coordinates on the line ``y = z = 0``.
    The two spheres (diameter ``eps = 1/N``) sit at the facing segment ends
    and are separated by a gap of ``eps``.
    """
    eps = 1.0 / N
    x_center, y_center = -eps, eps
    x_segment = (x_center - eps / 2 - 1.0, x_center - eps / 2)
    y_segment = (y_center + eps / 2, y_center + eps / 2 + 1.0)
    return eps, x_segment, y_segment, x_center, y_center


def _on_line(xs):
    return np.stack([xs, np.zeros_like(xs), np.zeros_like(xs)], axis=1)


def segments_with_spheres(N, seed=SPHERE_SEED):
    """Strongly non-uniform 3D point sets of size ``26 N`` each.

    Each set is ``N`` equispaced points on a unit segment followed by
    ``25 N`` points filling a ball of diameter ``1/N`` at the segment's
    near end (rejection sampling, seeded).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    eps, xs, ys, xc, yc = segments_geometry(N)
    rng = np.random.default_rng(seed)
    X = np.vstack([
        _on_line(np.linspace(xs[0], xs[1], N)),
        _fill_ball(rng, (xc, 0.0, 0.0), eps / 2, 25 * N),
    ])
    Y = np.vstack([
        _on_line(np.linspace(ys[0], ys[1], N)),
        _fill_ball(rng, (yc, 0.0, 0.0), eps / 2, 25 * N),
    ])
    return X, Y


def segment_probe_points(N, count):
    """``count`` equispaced points on each of the two segments (no spheres)."""
    _, xs, ys, _, _ = segments_geometry(N)
    return _on_line(np.linspace(xs[0], xs[1], count)), _on_line(np.linspace(ys[0], ys[1], count))


def squares2d():
    """Unit squares centered at (0.5, 0.5) and (2.5, 2.5)."""
    return Box((0.0, 0.0), (1.0, 1.0)), Box((2.0, 2.0), (3.0, 3.0))


def plates3d():
    """Perpendicular plates: X in the plane x1 = -1, Y in the plane x3 = -1."""
    return Box.from_bounds(*PLATE_X), Box.from_bounds(*PLATE_Y)


def side_by_side_squares(distance):
    """Unit squares side by side with ``distance`` between their closest edges."""
    return Box((0.0, 0.0), (1.0, 1.0)), Box((1.0 + distance, 0.0), (2.0 + distance, 1.0))
