import logging
import math
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np
import pandas as pd
from matplotlib.tri import LinearTriInterpolator, TrapezoidMapTriFinder, Triangulation

from . import PointLocationError
from .assembly import FemSolution, assemble_and_solve, assemble_mass, assemble_stiffness
from .mesh import TriMesh

logger = logging.getLogger(__name__)

RIM_TOL = 1e-10
PUBLISHED_ORDERS = {'l2_slope': 1.989, 'h1_slope': 1.008, 'local': (1.859, 2.051, 2.015, 1.986)}


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _along_rim(mesh: TriMesh, values: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Linear interpolation along the rim chord whose angular span contains each point."""
    e = mesh.boundary_edges
    start, end = mesh.nodes[e[:, 0]], mesh.nodes[e[:, 1]]
    start_angle = np.mod(np.arctan2(start[:, 1], start[:, 0]), 2.0 * math.pi)
    order = np.argsort(start_angle, kind='stable')
    angle = np.mod(np.arctan2(points[:, 1], points[:, 0]), 2.0 * math.pi)
    edge = order[np.mod(np.searchsorted(start_angle[order], angle, side='right') - 1, len(order))]

    p, q = start[edge], end[edge]
    direction = points / np.linalg.norm(points, axis=1, keepdims=True)
    t = _cross(p, direction) / _cross(direction, q - p)
    return (1.0 - t) * values[e[edge, 0]] + t * values[e[edge, 1]]


def interpolate(mesh: TriMesh, values: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Evaluate the P1 field with nodal `values` at arbitrary points.

    Points outside the triangulation but inside the closed disk lie between a
    rim chord and the circle (refined rim nodes among them). They take the
    value at their radial projection onto that chord. Points beyond the
    circle raise PointLocationError.
    """
    points = np.asarray(points, dtype=np.float64)
    triangulation = Triangulation(mesh.nodes[:, 0], mesh.nodes[:, 1], mesh.elems)
    finder = TrapezoidMapTriFinder(triangulation)
    interpolator = LinearTriInterpolator(triangulation, values, trifinder=finder)
    result = interpolator(points[:, 0], points[:, 1])
    outside = np.ma.getmaskarray(result)
    result = np.ma.getdata(result).astype(np.float64)

    if outside.any():
        radius = np.linalg.norm(points[outside], axis=1)
        beyond = radius - mesh.radius > RIM_TOL * max(mesh.radius, 1.0)
        if beyond.any():
            first = points[outside][np.argmax(beyond)]
            raise PointLocationError(f'{int(beyond.sum())} points lie outside the level-{mesh.level} mesh, '
                                     f'e.g. {first.tolist()}')
        result[outside] = _along_rim(mesh, values, points[outside])
    return result


def prolongate(coarse: TriMesh, values: np.ndarray, fine: TriMesh) -> np.ndarray:
    return interpolate(coarse, values, fine.nodes)


@dataclass
class ConvergencePair:
    h_coarse: float
    h_fine: float
    l2: float
    h1: float


@dataclass
class ConvergenceReport:
    pairs: List[ConvergencePair]
    l2_slope: float
    h1_slope: float
    local_l2: List[float]
    solutions: List[FemSolution] = field(default_factory=list, repr=False)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([vars(pair) for pair in self.pairs])
        frame.insert(0, 'pair', np.arange(1, len(self.pairs) + 1))
        return frame

    def orders_frame(self) -> pd.DataFrame:
        rows = [{'metric': 'global_l2_slope', 'order': self.l2_slope, 'published': PUBLISHED_ORDERS['l2_slope']}]
        for i, order in enumerate(self.local_l2):
            published = PUBLISHED_ORDERS['local'][i] if i < len(PUBLISHED_ORDERS['local']) else math.nan
            rows.append({'metric': f'local_{i + 1}_{i + 2}_{i + 3}', 'order': order, 'published': published})
        rows.append({'metric': 'global_h1_slope', 'order': self.h1_slope, 'published': PUBLISHED_ORDERS['h1_slope']})
        return pd.DataFrame(rows)

    def __str__(self):
        return f'L2 slope {self.l2_slope:.3f}, H1 slope {self.h1_slope:.3f} over {len(self.pairs)} pairs'


def _slope(h: Sequence[float], err: Sequence[float]) -> float:
    return float(np.polyfit(np.log(h), np.log(err), 1)[0])


def convergence_study(hierarchy: Sequence[TriMesh],
                      k: float,
                      q: float,
                      h: float,
                      t_inf: float) -> ConvergenceReport:
    """Inter-level differences w = T_f - P T_c measured exactly on each fine mesh."""
    if len(hierarchy) < 3:
        raise ValueError(f'a convergence study needs at least 3 levels, got {len(hierarchy)}')

    solutions = [assemble_and_solve(mesh, k, q, h, t_inf) for mesh in hierarchy]
    pairs = []
    for coarse, fine in zip(solutions[:-1], solutions[1:]):
        w = fine.temperature - prolongate(coarse.mesh, coarse.temperature, fine.mesh)
        mass = assemble_mass(fine.mesh)
        gradient = assemble_stiffness(fine.mesh, 1.0)
        pair = ConvergencePair(h_coarse=coarse.mesh.h_max,
                               h_fine=fine.mesh.h_max,
                               l2=math.sqrt(max(float(w @ (mass @ w)), 0.0)),
                               h1=math.sqrt(max(float(w @ (gradient @ w)), 0.0)))
        logger.info(f'levels {coarse.mesh.level}-{fine.mesh.level}: h_f={pair.h_fine:.3e}, '
                    f'L2={pair.l2:.4e}, H1={pair.h1:.4e}')
        pairs.append(pair)

    h_fine = [pair.h_fine for pair in pairs]
    l2 = [pair.l2 for pair in pairs]
    local = [math.log(l2[i] / l2[i + 1]) / math.log(h_fine[i] / h_fine[i + 1]) for i in range(len(pairs) - 1)]
    return ConvergenceReport(pairs=pairs,
                             l2_slope=_slope(h_fine, l2),
                             h1_slope=_slope(h_fine, [pair.h1 for pair in pairs]),
                             local_l2=local,
                             solutions=solutions)
