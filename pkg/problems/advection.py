"""1D advection-reaction (drift-decay) on (x, t) in [0, 2] x [0, 1].

    u_x - 2 u_t - u = 0,   u(x, 0) = 6 exp(-3x),   u(2, t) = 6 exp(-6 - 2t)

Characteristics run leftward, so x = 2 is the inflow boundary.
"""
import torch

from autodiff import TaylorJet, jet_exp
from model.field import AnalyticField
from physics import TermKind
from . import EvalGrid, ProblemDef, make_term, merge_options
from .sampling import Sampler

X, T = 0, 1
LO, HI = (0.0, 0.0), (2.0, 1.0)

COUNTS = {'pde': 2000, 'ic': 1000, 'bc': 1000}
TRAIN_ITERS = 8000
PUBLISHED_METRICS = {'lnn': (0.001758, 0.001653), 'mlp': (0.007496, 0.007442)}


def exact_solution(x: TaylorJet) -> TaylorJet:
    return 6.0 * jet_exp(-3.0 * x.select(X) - 2.0 * x.select(T))


def _pde(u, points, normals):
    return u[(X, 1)] - 2.0 * u[(T, 1)] - u.value


def _initial(u, points, normals):
    return u.value - 6.0 * torch.exp(-3.0 * points[:, X])


def _inflow(u, points, normals):
    return u.value - 6.0 * torch.exp(-6.0 - 2.0 * points[:, T])


def advection_reaction(seed: int = 0,
                       counts: dict = None,
                       weights: dict = None,
                       constants: dict = None) -> ProblemDef:
    counts = merge_options(COUNTS, counts, 'sample count')
    weights = merge_options({name: 1.0 for name in COUNTS}, weights, 'term weight')
    merge_options({}, constants, 'constant')

    terms = [
        make_term('pde', TermKind.PDE,
                  Sampler('rectangle', counts['pde'], seed, stream=0, lo=LO, hi=HI),
                  [(X, 1), (T, 1)], _pde, weights['pde']),
        make_term('ic', TermKind.IC,
                  Sampler('segment', counts['ic'], seed, stream=1, lo=(0.0, 0.0), hi=(2.0, 0.0)),
                  [], _initial, weights['ic']),
        make_term('bc', TermKind.DIRICHLET,
                  Sampler('segment', counts['bc'], seed, stream=2, lo=(2.0, 0.0), hi=(2.0, 1.0)),
                  [], _inflow, weights['bc']),
    ]
    return ProblemDef(name='advection',
                      input_dim=2,
                      axis_names=('x', 't'),
                      terms=terms,
                      train_iters=TRAIN_ITERS,
                      reference=AnalyticField(exact_solution),
                      eval_grid=EvalGrid(lo=LO, hi=HI),
                      bounds=(LO, HI),
                      published_metrics=PUBLISHED_METRICS)
