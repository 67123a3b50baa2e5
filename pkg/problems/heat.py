"""Steady heat conduction in a circular plate with a uniform source and convective cooling.

Coordinates are scaled by the radius R and the temperature rise by T_ref,
T = T_inf + T_ref * theta. The network predicts theta on the unit disk, but the
residuals are formed in physical units

    pde: (k T_ref / R^2) (theta_xx + theta_yy) + Q
    bc:  (k T_ref / R) n . grad(theta) + h T_ref theta

and normalized by the residual scales. With the default `appendix_A` scales
these reduce exactly to theta_xx + theta_yy + Q_nd and n . grad(theta) + h_nd theta.
"""
import logging
from typing import Dict

import numpy as np
import torch

from autodiff import TaylorJet
from fem import FemSolution, interpolate
from model.field import AnalyticField, FieldEval
from physics import UNIT_SCALES, ScaleSet, TermKind, compute_scales
from . import EvalGrid, ProblemDef, make_term, merge_options
from .sampling import Sampler

logger = logging.getLogger(__name__)

X, Y = 0, 1
LO, HI = (-1.0, -1.0), (1.0, 1.0)

CONSTANTS = {'k': 159.0, 'h': 50.0, 'T_inf': 800.0, 'Q': 2000.0, 'R': 0.15, 'T_ref': 1.0}
SCALINGS = ('appendix_A', 'unit')
COUNTS = {'pde': 3000, 'bc': 500}
TRAIN_ITERS = 50000
PUBLISHED_METRICS = {'lnn': (0.000225, 0.000222), 'mlp': (0.000319, 0.000315)}


def nondimensional(constants: Dict[str, float]) -> Dict[str, float]:
    c = constants
    return {'Q_nd': c['Q'] * c['R'] ** 2 / (c['k'] * c['T_ref']),
            'h_nd': c['h'] * c['R'] / c['k']}


def heat_scales(constants: Dict[str, float]) -> ScaleSet:
    c = constants
    return compute_scales(l_ref=c['R'], t_ref=1.0, u_ref=c['T_ref'], k_star=c['k'],
                          coefficients=[(c['k'], 2, 0)])


def radial_solution(constants: Dict[str, float]):
    """theta*(r) = Q_nd (1 - r^2) / 4 + Q_nd / (2 h_nd), written over (x, y) jets."""
    nd = nondimensional(constants)
    q, h = nd['Q_nd'], nd['h_nd']

    def theta(x: TaylorJet) -> TaylorJet:
        r2 = x.select(X) ** 2 + x.select(Y) ** 2
        return (1.0 - r2) * (q / 4.0) + q / (2.0 * h)
    return theta


def _inside_disk(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    return first ** 2 + second ** 2 <= 1.0


def disk_heat(seed: int = 0,
              counts: dict = None,
              weights: dict = None,
              constants: dict = None,
              scaling: str = 'appendix_A') -> ProblemDef:
    if scaling not in SCALINGS:
        raise ValueError(f'scaling must be one of {SCALINGS}, got {scaling!r}')
    counts = merge_options(COUNTS, counts, 'sample count')
    weights = merge_options({name: 1.0 for name in COUNTS}, weights, 'term weight')
    c = merge_options(CONSTANTS, constants, 'constant')
    for name, value in c.items():
        if name != 'T_inf' and value <= 0:
            raise ValueError(f'heat constant {name} must be positive, got {value}')

    scales = heat_scales(c) if scaling == 'appendix_A' else UNIT_SCALES
    interior_coef = c['k'] * c['T_ref'] / c['R'] ** 2
    flux_coef = c['k'] * c['T_ref'] / c['R']
    film_coef = c['h'] * c['T_ref']

    def pde(theta, points, normals):
        return interior_coef * (theta[(X, 2)] + theta[(Y, 2)]) + c['Q']

    def robin(theta, points, normals):
        normal_flux = normals[:, X] * theta[(X, 1)] + normals[:, Y] * theta[(Y, 1)]
        return flux_coef * normal_flux + film_coef * theta.value

    terms = [
        make_term('pde', TermKind.PDE,
                  Sampler('disk', counts['pde'], seed, stream=0),
                  [(X, 2), (Y, 2)], pde, weights['pde'], scales.s_omega),
        make_term('bc', TermKind.ROBIN,
                  Sampler('circle', counts['bc'], seed, stream=1),
                  [(X, 1), (Y, 1)], robin, weights['bc'], scales.s_n),
    ]
    nd = nondimensional(c)
    logger.debug(f'disk heat: Q_nd={nd["Q_nd"]:.8f}, h_nd={nd["h_nd"]:.8f}, scales={scales}')

    return ProblemDef(name='heat',
                      input_dim=2,
                      axis_names=('x', 'y'),
                      terms=terms,
                      train_iters=TRAIN_ITERS,
                      reference=AnalyticField(radial_solution(c)),
                      eval_grid=EvalGrid(lo=LO, hi=HI, mask=_inside_disk),
                      scales=scales,
                      constants={**c, **nd},
                      published_metrics=PUBLISHED_METRICS)


class FemReference:
    """Nondimensional rise theta of a finite-element solution, usable wherever a reference field is."""

    def __init__(self, solution: FemSolution, constants: Dict[str, float]):
        self.solution = solution
        self.radius = constants['R']
        self.t_ref = constants['T_ref']

    def __call__(self, points, required=()) -> FieldEval:
        if required:
            raise ValueError('the finite-element reference only provides values')
        physical = self.radius * points.detach().cpu().numpy()
        rise = interpolate(self.solution.mesh, self.solution.rise, physical)
        return FieldEval(torch.from_numpy(rise / self.t_ref), {})
