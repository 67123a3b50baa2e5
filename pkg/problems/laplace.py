"""2D Laplace equation for a scalar potential on the unit square, mixed boundary conditions.

    phi_xx + phi_yy = 0,  phi(x, 0) = 0,  phi(x, 1) = 1,  phi_x(0, y) = phi_x(1, y) = 0
"""
from autodiff import TaylorJet
from model.field import AnalyticField
from physics import TermKind
from . import EvalGrid, ProblemDef, make_term, merge_options
from .sampling import Sampler

X, Y = 0, 1
LO, HI = (0.0, 0.0), (1.0, 1.0)

COUNTS = {'pde': 1000, 'bottom': 1000, 'top': 1000, 'left': 1000, 'right': 1000}
TRAIN_ITERS = 5000
PUBLISHED_METRICS = {'lnn': (0.000342, 0.000323), 'mlp': (0.013116, 0.013085)}


def exact_solution(x: TaylorJet) -> TaylorJet:
    return x.select(Y)


def _pde(phi, points, normals):
    return phi[(X, 2)] + phi[(Y, 2)]


def _bottom(phi, points, normals):
    return phi.value


def _top(phi, points, normals):
    return phi.value - 1.0


def _insulated(phi, points, normals):
    return phi[(X, 1)]


def laplace_mixed(seed: int = 0,
                  counts: dict = None,
                  weights: dict = None,
                  constants: dict = None) -> ProblemDef:
    counts = merge_options(COUNTS, counts, 'sample count')
    weights = merge_options({name: 1.0 for name in COUNTS}, weights, 'term weight')
    merge_options({}, constants, 'constant')

    edges = {'bottom': ((0.0, 0.0), (1.0, 0.0), TermKind.DIRICHLET, _bottom, []),
             'top': ((0.0, 1.0), (1.0, 1.0), TermKind.DIRICHLET, _top, []),
             'left': ((0.0, 0.0), (0.0, 1.0), TermKind.NEUMANN, _insulated, [(X, 1)]),
             'right': ((1.0, 0.0), (1.0, 1.0), TermKind.NEUMANN, _insulated, [(X, 1)])}

    terms = [make_term('pde', TermKind.PDE,
                       Sampler('rectangle', counts['pde'], seed, stream=0, lo=LO, hi=HI),
                       [(X, 2), (Y, 2)], _pde, weights['pde'])]
    for stream, (name, (start, end, kind, fn, required)) in enumerate(edges.items(), start=1):
        terms.append(make_term(name, kind,
                               Sampler('segment', counts[name], seed, stream=stream, lo=start, hi=end),
                               required, fn, weights[name]))

    return ProblemDef(name='laplace',
                      input_dim=2,
                      axis_names=('x', 'y'),
                      terms=terms,
                      train_iters=TRAIN_ITERS,
                      reference=AnalyticField(exact_solution),
                      eval_grid=EvalGrid(lo=LO, hi=HI),
                      bounds=(LO, HI),
                      published_metrics=PUBLISHED_METRICS)
