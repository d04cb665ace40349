"""Kernel functions and dense kernel-matrix assembly.

Every :class:`KernelFn` carries a thread-safe evaluation counter; the
complexity claims of the method are stated in kernel evaluations, so the
counter is what the timing experiment and the tests measure.
"""

import threading

import numpy as np

from .geometry import as_points


def _sqdist(X, Y):
    # accumulate per coordinate to keep memory at m*n
    r2 = np.zeros((X.shape[0], Y.shape[0]))
    for k in range(X.shape[1]):
        diff = X[:, k, None] - Y[None, :, k]
        r2 += diff * diff
    return r2


def _radial(profile):
    def block(X, Y):
        with np.errstate(divide="ignore", invalid="ignore"):
            return profile(_sqdist(X, Y))
    return block


def _inv_r(r2):
    return 1.0 / np.sqrt(r2)


def _inv_r2(r2):
    return 1.0 / r2


def _inv_r3(r2):
    return 1.0 / (r2 * np.sqrt(r2))


def _log_r(r2):
    return 0.5 * np.log(r2)


def _exp_neg_r(r2):
    return np.exp(-np.sqrt(r2))


def _exp_neg_r2(r2):
    return np.exp(-r2)


def _toy_1d(X, Y):
    return 1.0 / (4.0 + X[:, 0, None] - Y[None, :, 0])


class KernelFn:
    """A bivariate kernel ``K(x, y)`` with an evaluation counter.

    Parameters
    ----------
    name : str
        Tag used in reports and on the command line.
    block : callable
        ``block(X, Y) -> (m, n)`` array for point arrays ``X (m, d)``,
        ``Y (n, d)``.
    dim : int or None
        Required point dimension, or ``None`` for any.
    symmetric : bool
        Whether ``K(x, y) == K(y, x)``.
    """

    def __init__(self, name, block, dim=None, symmetric=True):
        self.name = name
        self._block = block
        self.dim = dim
        self.symmetric = symmetric
        self._lock = threading.Lock()
        self._evals = 0

    def __repr__(self):
        return f"KernelFn({self.name!r})"

    @property
    def evals(self):
        return self._evals

    def reset_count(self):
        with self._lock:
            self._evals = 0

    def _add(self, count):
        with self._lock:
            self._evals += count

    def block(self, X, Y, count=True):
        """Kernel matrix ``K(X, Y)``; adds ``m * n`` to the counter if ``count``."""
        X = as_points(X, self.dim)
        Y = as_points(Y, self.dim)
        if X.shape[1] != Y.shape[1]:
            raise ValueError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
        out = self._block(X, Y)
        if count:
            self._add(out.size)
        return out

    def __call__(self, x, y):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        return float(self.block(x[None, :], y[None, :])[0, 0])

    def transpose(self):
        """The kernel ``(y, x) -> K(x, y)`` (own counter)."""
        block = self._block
        return KernelFn(self.name + "_T", lambda X, Y: block(Y, X).T, self.dim, self.symmetric)


_BUILTINS = {
    "inv_r": (_inv_r, "1/r"),
    "inv_r2": (_inv_r2, "1/r^2"),
    "inv_r3": (_inv_r3, "1/r^3"),
    "log_r": (_log_r, "log(r)"),
    "exp_neg_r": (_exp_neg_r, "exp(-r)"),
    "exp_neg_r2": (_exp_neg_r2, "exp(-r^2)"),
}

KERNEL_NAMES = tuple(_BUILTINS) + ("toy_1d",)


def builtin_kernel(name):
    """Return a fresh :class:`KernelFn` for one of :data:`KERNEL_NAMES`.

    Singular kernels evaluate to ``inf`` (or ``-inf`` for ``log_r``) at
    coincident points rather than raising.
    """
    if name == "toy_1d":
        return KernelFn("toy_1d", _toy_1d, dim=1, symmetric=False)
    try:
        profile, _ = _BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown kernel {name!r}; choose from {', '.join(KERNEL_NAMES)}") from None
    return KernelFn(name, _radial(profile))


def assemble(kernel, X, Y):
    """Dense ``K(X, Y)`` with entry ``(i, j) = K(x_i, y_j)``."""
    return kernel.block(X, Y)
