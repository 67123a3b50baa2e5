import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import Callable, Dict, Sequence, Tuple

import torch
from torch import Tensor

from model.field import FieldEval
from .residuals import ResidualTerm, TermKind

FieldEvaluator = Callable[..., FieldEval]


def residuals(term: ResidualTerm, field: FieldEvaluator) -> Tensor:
    """Raw residuals r(x) of a term on its sample set, shape (N,) or (N, m)."""
    evaluation = field(term.points, term.required_derivs)
    return term.residual_fn(evaluation, term.points, term.normals)


def component_mse(term: ResidualTerm, field: FieldEvaluator) -> Tensor:
    """(1/N) sum ||r(x)/s||^2 over the term's samples."""
    if term.count == 0:
        raise ValueError(f'term {term.name} has an empty sample set')
    r = residuals(term, field) / term.scale
    squared = r ** 2
    if squared.dim() > 1:
        squared = squared.sum(dim=-1)
    return squared.mean()


def _check_terms(terms: Sequence[ResidualTerm]):
    if not any(term.kind == TermKind.PDE for term in terms):
        raise ValueError('the composite loss needs at least one PDE term')
    names = [term.name for term in terms]
    if len(set(names)) != len(names):
        raise ValueError(f'term names must be unique, got {names}')


def composite_loss(terms: Sequence[ResidualTerm], field: FieldEvaluator) -> Tuple[Tensor, Dict[str, Tensor]]:
    """Weighted sum of component MSEs; the breakdown keeps insertion order and the unweighted MSEs."""
    _check_terms(terms)
    breakdown = OrderedDict()
    total = None
    for term in terms:
        mse = component_mse(term, field)
        breakdown[term.name] = mse
        contribution = term.weight * mse
        total = contribution if total is None else total + contribution
    return total, breakdown


def weight_matrix(terms: Sequence[ResidualTerm]) -> Dict[str, float]:
    """Diagonal of W per term: sqrt(lambda) / s, so that ||W r||^2 / N reproduces the weighted MSE."""
    return OrderedDict((term.name, math.sqrt(term.weight) / term.scale) for term in terms)


@dataclass
class BalanceReport:
    energies: Dict[str, float]
    kappa: float
    degenerate: bool

    def __str__(self):
        rows = ', '.join(f'{name}={value:.3e}' for name, value in self.energies.items())
        flag = ' (a component vanished)' if self.degenerate else ''
        return f'kappa={self.kappa:.3e}{flag}: {rows}'


def balance_report(terms: Sequence[ResidualTerm], field: FieldEvaluator) -> BalanceReport:
    """Normalized component energies C_i and their spread kappa = max_i C_i / min_j C_j."""
    _check_terms(terms)
    with torch.no_grad():
        energies = OrderedDict((term.name, float(component_mse(term, field))) for term in terms)
    values = list(energies.values())
    smallest = min(values)
    if smallest == 0.0:
        return BalanceReport(energies=energies, kappa=math.inf, degenerate=True)
    return BalanceReport(energies=energies, kappa=max(values) / smallest, degenerate=False)
