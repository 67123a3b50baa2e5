from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix

from . import ConvergenceError


@dataclass
class CGResult:
    x: np.ndarray
    iterations: int
    residual: float
    converged: bool


def conjugate_gradient(A: csr_matrix,
                       b: np.ndarray,
                       x0: Optional[np.ndarray] = None,
                       tol: float = 1e-12,
                       maxiter: Optional[int] = None) -> CGResult:
    """Jacobi-preconditioned CG for a symmetric positive definite A.

    Stops when the recursively updated residual drops below `tol` times the
    initial residual. Nonpositive curvature p^T A p means A is not SPD.
    """
    n = A.shape[0]
    if maxiter is None:
        maxiter = 10 * n
    diag = A.diagonal()
    if np.any(diag <= 0):
        raise ConvergenceError(f'Jacobi preconditioner needs a positive diagonal, min is {diag.min():.3e}')

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)
    r = b - A @ x
    r0 = np.linalg.norm(r)
    if r0 == 0.0:
        return CGResult(x=x, iterations=0, residual=0.0, converged=True)

    z = r / diag
    p = z.copy()
    rz = r @ z
    for k in range(1, maxiter + 1):
        Ap = A @ p
        curvature = p @ Ap
        if curvature <= 0:
            raise ConvergenceError(f'nonpositive curvature {curvature:.3e} at CG iteration {k}')
        alpha = rz / curvature
        x += alpha * p
        r -= alpha * Ap
        residual = np.linalg.norm(r) / r0
        if residual <= tol:
            return CGResult(x=x, iterations=k, residual=residual, converged=True)
        z = r / diag
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    return CGResult(x=x, iterations=maxiter, residual=residual, converged=False)
