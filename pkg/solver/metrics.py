from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Optional

import numpy as np
import pandas as pd
import torch

from model.field import FieldEval, NetworkField
from model.params import NetworkParams
from physics import balance_report
from problems import ProblemDef

Reference = Callable[..., FieldEval]


@dataclass(frozen=True)
class Metrics:
    rmse: float
    mae: float
    points: int

    def __str__(self):
        return f'rmse={self.rmse:.17g}\nmae={self.mae:.17g}\n'

    def save(self, path):
        Path(path).write_text(str(self))

    @classmethod
    def load(cls, path) -> 'Metrics':
        values = dict(line.split('=', 1) for line in Path(path).read_text().split())
        return cls(rmse=float(values['rmse']), mae=float(values['mae']), points=0)


@dataclass
class GridPrediction:
    """Network and reference values on the evaluation grid; NaN outside the domain."""
    first: np.ndarray
    second: np.ndarray
    predicted: np.ndarray
    reference: np.ndarray

    @property
    def error(self) -> np.ndarray:
        return np.abs(self.predicted - self.reference)


def _values(field: Reference, points: torch.Tensor) -> np.ndarray:
    with torch.no_grad():
        return field(points).value.detach().cpu().numpy().reshape(points.shape[0])


def _reference(problem: ProblemDef, reference: Optional[Reference]) -> Reference:
    reference = problem.reference if reference is None else reference
    if reference is None:
        raise ValueError(f'{problem.name} has no reference solution to evaluate against')
    return reference


def predict_grid(params: NetworkParams,
                 problem: ProblemDef,
                 reference: Optional[Reference] = None) -> GridPrediction:
    reference = _reference(problem, reference)
    first, second, inside = problem.eval_grid.mesh()
    points = problem.eval_grid.points()

    predicted = np.full(first.shape, np.nan)
    exact = np.full(first.shape, np.nan)
    predicted[inside] = _values(NetworkField(params, bounds=problem.bounds), points)
    exact[inside] = _values(reference, points)
    return GridPrediction(first=first, second=second, predicted=predicted, reference=exact)


def score(field: Reference,
          problem: ProblemDef,
          reference: Optional[Reference] = None) -> Metrics:
    """RMSE and MAE of any field against the reference over the masked evaluation grid."""
    reference = _reference(problem, reference)
    points = problem.eval_grid.points()
    diff = _values(field, points) - _values(reference, points)
    return Metrics(rmse=float(np.sqrt(np.mean(diff ** 2))),
                   mae=float(np.mean(np.abs(diff))),
                   points=int(points.shape[0]))


def evaluate(params: NetworkParams,
             problem: ProblemDef,
             reference: Optional[Reference] = None) -> Metrics:
    return score(NetworkField(params, bounds=problem.bounds), problem, reference)


def balance_frame(params: NetworkParams,
                  variants: Mapping[str, ProblemDef]) -> pd.DataFrame:
    """Loss balance of one parameter vector under each residual scaling, one row per provenance.

    Columns: provenance, kappa, degenerate and one `energy_<term>` column per term.
    """
    rows = []
    for provenance, problem in variants.items():
        report = balance_report(problem.terms, NetworkField(params, bounds=problem.bounds))
        rows.append({'provenance': provenance, 'kappa': report.kappa, 'degenerate': report.degenerate,
                     **{f'energy_{name}': energy for name, energy in report.energies.items()}})
    return pd.DataFrame(rows)
