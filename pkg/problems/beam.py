"""Anisotropic Poisson-beam equation on the unit square.

    u_xx - u_yyyy = (2 - x^2) exp(-y)

Second order along x, fourth order along y, closed by Dirichlet data on all
four edges and u_yy data on the horizontal ones. Exact solution x^2 exp(-y).
"""
import math

import torch

from autodiff import TaylorJet, jet_exp
from model.field import AnalyticField
from physics import TermKind
from . import EvalGrid, ProblemDef, make_term, merge_options
from .sampling import Sampler

X, Y = 0, 1
LO, HI = (0.0, 0.0), (1.0, 1.0)

COUNTS = {'pde': 1000, 'bottom_yy': 1000, 'top_yy': 1000,
          'bottom': 1000, 'top': 1000, 'left': 1000, 'right': 1000}
TRAIN_ITERS = 5000
PUBLISHED_METRICS = {'lnn': (0.001886, 0.001808), 'mlp': (0.007708, 0.007658)}


def exact_solution(x: TaylorJet) -> TaylorJet:
    return x.select(X) ** 2 * jet_exp(-x.select(Y))


def source(points):
    x, y = points[:, X], points[:, Y]
    return (2.0 - x ** 2) * torch.exp(-y)


def _pde(u, points, normals):
    return u[(X, 2)] - u[(Y, 4)] - source(points)


def _bottom_yy(u, points, normals):
    return u[(Y, 2)] - points[:, X] ** 2


def _top_yy(u, points, normals):
    return u[(Y, 2)] - points[:, X] ** 2 / math.e


def _bottom(u, points, normals):
    return u.value - points[:, X] ** 2


def _top(u, points, normals):
    return u.value - points[:, X] ** 2 / math.e


def _left(u, points, normals):
    return u.value


def _right(u, points, normals):
    return u.value - torch.exp(-points[:, Y])


BOUNDARIES = {
    'bottom_yy': ((0.0, 0.0), (1.0, 0.0), TermKind.DERIV_BC, _bottom_yy, [(Y, 2)]),
    'top_yy': ((0.0, 1.0), (1.0, 1.0), TermKind.DERIV_BC, _top_yy, [(Y, 2)]),
    'bottom': ((0.0, 0.0), (1.0, 0.0), TermKind.DIRICHLET, _bottom, []),
    'top': ((0.0, 1.0), (1.0, 1.0), TermKind.DIRICHLET, _top, []),
    'left': ((0.0, 0.0), (0.0, 1.0), TermKind.DIRICHLET, _left, []),
    'right': ((1.0, 0.0), (1.0, 1.0), TermKind.DIRICHLET, _right, []),
}


def poisson_beam(seed: int = 0,
                 counts: dict = None,
                 weights: dict = None,
                 constants: dict = None) -> ProblemDef:
    counts = merge_options(COUNTS, counts, 'sample count')
    weights = merge_options({name: 1.0 for name in COUNTS}, weights, 'term weight')
    merge_options({}, constants, 'constant')

    terms = [make_term('pde', TermKind.PDE,
                       Sampler('rectangle', counts['pde'], seed, stream=0, lo=LO, hi=HI),
                       [(X, 2), (Y, 4)], _pde, weights['pde'])]
    for stream, (name, (start, end, kind, fn, required)) in enumerate(BOUNDARIES.items(), start=1):
        terms.append(make_term(name, kind,
                               Sampler('segment', counts[name], seed, stream=stream, lo=start, hi=end),
                               required, fn, weights[name]))

    return ProblemDef(name='beam',
                      input_dim=2,
                      axis_names=('x', 'y'),
                      terms=terms,
                      train_iters=TRAIN_ITERS,
                      reference=AnalyticField(exact_solution),
                      eval_grid=EvalGrid(lo=LO, hi=HI),
                      bounds=(LO, HI),
                      published_metrics=PUBLISHED_METRICS)
