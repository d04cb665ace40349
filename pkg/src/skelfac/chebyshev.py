"""Chebyshev nodes of the first kind, their integration weights, tensor grids
over boxes, barycentric Lagrange evaluation and the grid-sizing heuristic.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import GridSizeError
from .geometry import tensor_points

M_MAX = 128
PROBE_POINTS = 101
DELTA_EXPONENT = 0.75


def _check_m(m):
    if int(m) != m or m < 1:
        raise ValueError(f"number of nodes must be a positive integer, got {m}")
    return int(m)


def cheb_nodes_1d(m):
    """``cos((2k-1) pi / (2m))`` for ``k = 1..m``, strictly decreasing.

    Evaluated as ``sin(pi (m - 2k + 1) / (2m))`` so the nodes are exactly
    symmetric and the middle node (odd ``m``) is exactly zero.
    """
    m = _check_m(m)
    k = np.arange(1, m + 1)
    return np.sin(np.pi * (m - 2 * k + 1) / (2 * m))


def cheb_weights_1d(m):
    """Integration weights ``(pi/m) sin((2k-1) pi / (2m))`` on [-1, 1].

    Evaluated as ``(pi/m) cos(pi (m - 2k + 1) / (2m))`` so that
    ``w_k == w_{m+1-k}`` exactly.
    """
    m = _check_m(m)
    k = np.arange(1, m + 1)
    return np.pi / m * np.cos(np.pi * (m - 2 * k + 1) / (2 * m))


def cheb_bary_weights(m):
    """Barycentric weights of the first-kind nodes, ``(-1)^k sin((2k-1) pi / (2m))``."""
    m = _check_m(m)
    k = np.arange(1, m + 1)
    return (-1.0) ** k * np.cos(np.pi * (m - 2 * k + 1) / (2 * m))


def bary_weights(nodes):
    """Barycentric weights ``1 / prod_{j != i} (x_i - x_j)`` of arbitrary distinct nodes.

    Rescaled by the max so that large node sets do not overflow; the
    second barycentric form is invariant to a common factor.
    """
    x = np.asarray(nodes, dtype=float)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    # log-magnitudes avoid over/underflow in the products
    logs = np.log(np.abs(diff)).sum(axis=1)
    sign = np.prod(np.sign(diff), axis=1)
    return sign * np.exp(-(logs - logs.min()))


def lagrange_row(x, nodes, weights=None):
    """Lagrange basis ``[l_1(x), ..., l_m(x)]`` through ``nodes``.

    Second (true) barycentric form. ``x`` may be a scalar, giving shape
    ``(m,)``, or an array of ``p`` points, giving ``(p, m)``. A probe that
    coincides with a node gets the exact unit vector.
    """
    nodes = np.asarray(nodes, dtype=float)
    w = bary_weights(nodes) if weights is None else np.asarray(weights, dtype=float)
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    diff = xs[:, None] - nodes[None, :]
    exact = diff == 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        terms = w[None, :] / diff
        L = terms / terms.sum(axis=1, keepdims=True)
    # exact hits, and probes so close to a node that w/diff overflows
    hit = exact.any(axis=1) | ~np.isfinite(L).all(axis=1)
    nearest = np.argmin(np.abs(diff[hit]), axis=1)
    L[hit] = 0.0
    L[np.flatnonzero(hit), nearest] = 1.0
    return L[0] if scalar else L


def lebesgue_function(x, nodes, weights=None):
    """``sum_i |l_i(x)|`` at each probe point."""
    return np.abs(np.atleast_2d(lagrange_row(np.atleast_1d(x), nodes, weights))).sum(axis=1)


def _map_nodes(lo, hi, m):
    if lo == hi:
        return np.array([lo]), np.array([1.0])
    t = cheb_nodes_1d(m)
    w = cheb_weights_1d(m)
    return lo + (hi - lo) * (t + 1) / 2, w * (hi - lo) / 2


@dataclass(frozen=True)
class TensorGrid:
    """Tensor grid of Chebyshev nodes over a box.

    ``points`` and ``weights`` are flattened lexicographically with the
    first dimension varying slowest. Flat box dimensions get a single node
    with unit weight (surface measure).
    """

    box: object
    counts: tuple
    nodes_1d: tuple = field(repr=False)
    weights_1d: tuple = field(repr=False)
    points: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def size(self):
        return int(np.prod(self.counts))

    def __len__(self):
        return self.size

    def interpolate(self, values, x):
        """Evaluate the tensor-product polynomial interpolant of ``values`` at points ``x``."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        vals = np.asarray(values, dtype=float).reshape(self.counts)
        out = np.empty(len(x))
        rows = [self._basis(i, x[:, i]) for i in range(len(self.counts))]
        for p in range(len(x)):
            v = vals
            # contract the last axis first so the remaining axes keep their order
            for i in reversed(range(len(self.counts))):
                v = v @ rows[i][p]
            out[p] = v
        return out

    def _basis(self, i, xi):
        nodes = self.nodes_1d[i]
        if len(nodes) == 1:
            return np.ones((len(xi), 1))
        return lagrange_row(xi, nodes, cheb_bary_weights(len(nodes)))


def tensor_grid(box, counts):
    """Chebyshev tensor grid over ``box`` with ``counts[i]`` nodes per dimension.

    Nodes are mapped affinely from [-1, 1]; 1D weights are scaled by
    ``(hi - lo) / 2`` and multiplied across dimensions.
    """
    counts = tuple(int(c) for c in np.atleast_1d(counts))
    if len(counts) != box.dim:
        raise ValueError(f"need {box.dim} counts, got {len(counts)}")
    for c, lo, hi in zip(counts, box.lo, box.hi):
        _check_m(c)
        if lo == hi and c != 1:
            raise ValueError("a flat dimension takes exactly one node")
    mapped = [_map_nodes(lo, hi, c) for lo, hi, c in zip(box.lo, box.hi, counts)]
    nodes = tuple(n for n, _ in mapped)
    weights = tuple(w for _, w in mapped)
    flat_w = tensor_points(weights).prod(axis=1)
    return TensorGrid(box, counts, nodes, weights, tensor_points(nodes), flat_w)


def _interp_error_1d(f, lo, hi, m, probe, f_probe, scale):
    t, _ = _map_nodes(lo, hi, m)
    vals = f(t)
    L = lagrange_row(probe, t, cheb_bary_weights(m))
    return np.max(np.abs(L @ vals - f_probe)) / scale


def _axis_counts(kernel, box, other_mid, delta, m_max, on_x):
    counts = []
    mid = box.midpoint
    for i, (lo, hi) in enumerate(zip(box.lo, box.hi)):
        if lo == hi:
            counts.append(1)
            continue

        def f(t, i=i):
            pts = np.tile(mid, (len(t), 1))
            pts[:, i] = t
            if on_x:
                return kernel.block(pts, other_mid[None, :], count=False)[:, 0]
            return kernel.block(other_mid[None, :], pts, count=False)[0, :]

        probe = np.linspace(lo, hi, PROBE_POINTS)
        f_probe = f(probe)
        if not np.all(np.isfinite(f_probe)):
            raise GridSizeError("kernel is not finite on the probe line; domains overlap")
        scale = np.max(np.abs(f_probe))
        if scale == 0:
            counts.append(1)
            continue
        for m in range(1, m_max + 1):
            if _interp_error_1d(f, lo, hi, m, probe, f_probe, scale) <= delta:
                counts.append(m)
                break
        else:
            raise GridSizeError(
                f"more than {m_max} Chebyshev nodes needed along dimension {i}: "
                "kernel not smooth enough or domains not well separated")
    return tuple(counts)


def grid_size_heuristic(kernel, boxX, boxY, epsilon, delta_exponent=DELTA_EXPONENT, m_max=M_MAX):
    """Per-dimension Chebyshev node counts for ``boxX`` and ``boxY``.

    For each dimension, the smallest count whose 1D interpolant of the
    kernel section through the box midpoint (other box fixed at its
    midpoint) has relative sup-error at most ``epsilon ** delta_exponent``
    on a 101-point equispaced probe. Probe evaluations are not counted.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    delta = epsilon ** delta_exponent
    cx = _axis_counts(kernel, boxX, boxY.midpoint, delta, m_max, on_x=True)
    cy = _axis_counts(kernel, boxY, boxX.midpoint, delta, m_max, on_x=False)
    return cx, cy
