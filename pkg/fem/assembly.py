import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix

from . import ConvergenceError
from .cg import CGResult, conjugate_gradient
from .mesh import TriMesh

logger = logging.getLogger(__name__)

DEGENERATE_TOL = 1e-14
MASS_PATTERN = np.array([[2.0, 1.0, 1.0],
                         [1.0, 2.0, 1.0],
                         [1.0, 1.0, 2.0]])
EDGE_PATTERN = np.array([[2.0, 1.0],
                         [1.0, 2.0]])


def _gradients(p: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """b_i = y_j - y_k, c_i = x_k - x_j over cyclic (i, j, k), and the signed area, for points (..., 3, 2)."""
    x, y = p[..., 0], p[..., 1]
    b = np.stack([y[..., 1] - y[..., 2], y[..., 2] - y[..., 0], y[..., 0] - y[..., 1]], axis=-1)
    c = np.stack([x[..., 2] - x[..., 1], x[..., 0] - x[..., 2], x[..., 1] - x[..., 0]], axis=-1)
    area = 0.5 * (b[..., 1] * c[..., 2] - b[..., 2] * c[..., 1])
    return b, c, area


def _checked_area(triangle: np.ndarray, area: float) -> float:
    extent = np.ptp(triangle, axis=0)
    if abs(area) < DEGENERATE_TOL * float(np.max(extent)) ** 2 or area == 0.0:
        raise ValueError(f'degenerate triangle {triangle.tolist()} (area {area:.3e})')
    return abs(area)


def element_stiffness(triangle, k: float) -> np.ndarray:
    """K_e = k (b b^T + c c^T) / (4 A)."""
    triangle = np.asarray(triangle, dtype=np.float64)
    b, c, area = _gradients(triangle)
    area = _checked_area(triangle, float(area))
    return k * (np.outer(b, b) + np.outer(c, c)) / (4.0 * area)


def element_mass(triangle) -> np.ndarray:
    triangle = np.asarray(triangle, dtype=np.float64)
    _, _, area = _gradients(triangle)
    return _checked_area(triangle, float(area)) / 12.0 * MASS_PATTERN


def edge_robin(length: float, h: float, t_inf: float) -> Tuple[np.ndarray, np.ndarray]:
    """Exact P1 segment integrals of a convective edge: C = (hL/6)[[2,1],[1,2]], g = (h T_inf L / 2)[1,1]."""
    if length <= 0:
        raise ValueError(f'edge length must be positive, got {length}')
    return h * length / 6.0 * EDGE_PATTERN, np.full(2, h * t_inf * length / 2.0)


def _scatter(local: np.ndarray, index: np.ndarray, n: int) -> csr_matrix:
    """Sum per-element (m, p, p) blocks into an n x n CSR matrix."""
    p = index.shape[1]
    rows = np.repeat(index, p, axis=1).ravel()
    cols = np.tile(index, (1, p)).ravel()
    return coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def assemble_stiffness(mesh: TriMesh, k: float = 1.0) -> csr_matrix:
    b, c, area = _gradients(mesh.nodes[mesh.elems])
    local = k * (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]) / (4.0 * area[:, None, None])
    return _scatter(local, mesh.elems, mesh.num_nodes)


def assemble_mass(mesh: TriMesh) -> csr_matrix:
    local = mesh.signed_areas[:, None, None] / 12.0 * MASS_PATTERN
    return _scatter(local, mesh.elems, mesh.num_nodes)


def _edge_lengths(mesh: TriMesh) -> np.ndarray:
    e = mesh.boundary_edges
    return np.linalg.norm(mesh.nodes[e[:, 1]] - mesh.nodes[e[:, 0]], axis=1)


def assemble(mesh: TriMesh, k: float, q: float, h: float, t_inf: float) -> Tuple[csr_matrix, np.ndarray, np.ndarray]:
    """System matrix A = K + C, load f (source) and g (convective) of [K + C] T = f + g."""
    n = mesh.num_nodes
    stiffness = assemble_stiffness(mesh, k)

    lengths = _edge_lengths(mesh)
    convective = _scatter(h * lengths[:, None, None] / 6.0 * EDGE_PATTERN, mesh.boundary_edges, n)
    g = np.zeros(n)
    np.add.at(g, mesh.boundary_edges.ravel(), np.repeat(h * t_inf * lengths / 2.0, 2))

    f = np.zeros(n)
    np.add.at(f, mesh.elems.ravel(), np.repeat(q * mesh.signed_areas / 3.0, 3))
    return (stiffness + convective).tocsr(), f, g


@dataclass
class FemSolution:
    mesh: TriMesh = field(repr=False)
    temperature: np.ndarray = field(repr=False)
    rise: np.ndarray = field(repr=False)
    k: float
    q: float
    h: float
    t_inf: float
    iterations: int

    def centre_rise(self) -> float:
        return float(self.rise[np.argmin(np.linalg.norm(self.mesh.nodes, axis=1))])


def assemble_and_solve(mesh: TriMesh,
                       k: float,
                       q: float,
                       h: float,
                       t_inf: float,
                       tol: float = 1e-12) -> FemSolution:
    """Nodal temperatures of the convectively cooled disk.

    K annihilates constants and C (T_inf 1) = g, so the system is solved for the
    rise u = T - T_inf from A u = f, then shifted back.
    """
    if h <= 0:
        raise ValueError(f'the convective coefficient must be positive for a definite system, got {h}')
    if k <= 0:
        raise ValueError(f'conductivity must be positive, got {k}')
    system, f, _ = assemble(mesh, k, q, h, t_inf)
    result: CGResult = conjugate_gradient(system, f, tol=tol, maxiter=10 * mesh.num_nodes)
    if not result.converged:
        raise ConvergenceError(f'CG stopped at relative residual {result.residual:.3e} on level {mesh.level}')
    logger.debug(f'level {mesh.level}: CG converged in {result.iterations} iterations')
    return FemSolution(mesh=mesh, temperature=t_inf + result.x, rise=result.x,
                       k=k, q=q, h=h, t_inf=t_inf, iterations=result.iterations)


def energy_balance(solution: FemSolution) -> Tuple[float, float]:
    """(source power Q |Omega_h|, convective loss sum of h L (u_a + u_b) / 2 over rim edges)."""
    mesh = solution.mesh
    e = mesh.boundary_edges
    rise = solution.rise
    loss = float(np.sum(solution.h * _edge_lengths(mesh) * 0.5 * (rise[e[:, 0]] + rise[e[:, 1]])))
    return solution.q * mesh.area, loss
