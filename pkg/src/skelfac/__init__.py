"""Low-rank factorization of kernel matrices by skeletonized interpolation.

Pivot points are chosen once, from Chebyshev grids over the bounding boxes
of the two point clouds, by rank-revealing QR on a quadrature-weighted
node matrix. Any pair of meshes inside those boxes is then factored as
``K(X, Yhat) K(Xhat, Yhat)^{-1} K(Xhat, Y)`` with ``O((m + n) r)`` kernel
evaluations.
"""

from .baselines import LowRankPair, aca, random_cur, rrqr_rank, svd_rank
from .chebyshev import TensorGrid, grid_size_heuristic, tensor_grid
from .errors import (
    DenseGuardError, EmptySelectionError, GridSizeError, SingularMatrixError, SkelfacError,
)
from .geometry import Box
from .kernels import KERNEL_NAMES, KernelFn, builtin_kernel
from .linalg import cpqr, lu_factor, lu_solve, strong_rrqr
from .skeleton import (
    SkelFactorization, s_hat_row, si_apply, si_error, si_factors, skeleton_from_nodes,
    skeletonize, t_hat_row,
)

__version__ = "0.1.0"
