from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import torch
from torch import Tensor

from autodiff import required_degree
from model.field import AnalyticField, Derivative
from physics import ResidualTerm, ScaleSet, TermKind, UNIT_SCALES
from physics.residuals import ResidualFn
from .sampling import Sampler, sample

GRID_SIZE = 101


@dataclass(frozen=True)
class EvalGrid:
    """Uniform grid over the bounding box, optionally masked to the domain."""
    lo: Tuple[float, float]
    hi: Tuple[float, float]
    n: int = GRID_SIZE
    mask: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None

    def axes(self) -> Tuple[np.ndarray, np.ndarray]:
        return (np.linspace(self.lo[0], self.hi[0], self.n),
                np.linspace(self.lo[1], self.hi[1], self.n))

    def mesh(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Grid coordinates (n, n), indexed [row=second axis, col=first axis], and the domain mask."""
        a, b = self.axes()
        first, second = np.meshgrid(a, b)
        inside = np.ones_like(first, dtype=bool) if self.mask is None else self.mask(first, second)
        return first, second, inside

    def points(self) -> Tensor:
        first, second, inside = self.mesh()
        pts = np.stack([first[inside], second[inside]], axis=1)
        return torch.from_numpy(np.ascontiguousarray(pts))


@dataclass(frozen=True, eq=False)
class ProblemDef:
    name: str
    input_dim: int
    axis_names: Tuple[str, ...]
    terms: List[ResidualTerm] = field(repr=False)
    train_iters: int
    reference: Optional[AnalyticField] = field(repr=False)
    eval_grid: EvalGrid = field(repr=False)
    bounds: Optional[Tuple[Tuple[float, ...], Tuple[float, ...]]] = None
    scales: ScaleSet = UNIT_SCALES
    constants: Dict[str, float] = field(default_factory=dict)
    published_metrics: Dict[str, Tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        if self.train_iters < 1:
            raise ValueError(f'{self.name}: train_iters must be positive, got {self.train_iters}')
        for term in self.terms:
            if term.count < 1:
                raise ValueError(f'{self.name}: term {term.name} has no samples')
            if term.points.shape[-1] != self.input_dim:
                raise ValueError(f'{self.name}: term {term.name} samples are not {self.input_dim}-dimensional')
            for _, order in term.required_derivs:
                required_degree(order)

    @property
    def sample_counts(self) -> Dict[str, int]:
        return {term.name: term.count for term in self.terms}

    def term(self, name: str) -> ResidualTerm:
        for term in self.terms:
            if term.name == name:
                return term
        raise KeyError(f'{self.name} has no term {name!r}; terms: {[t.name for t in self.terms]}')


def merge_options(defaults: Mapping, overrides: Optional[Mapping], what: str) -> Dict:
    merged = dict(defaults)
    for key, value in (overrides or {}).items():
        if key not in defaults:
            raise ValueError(f'unknown {what} {key!r}; expected one of {sorted(defaults)}')
        merged[key] = value
    return merged


def make_term(name: str,
              kind: TermKind,
              sampler: Sampler,
              required: Sequence[Derivative],
              residual_fn: ResidualFn,
              weight: float = 1.0,
              scale: float = 1.0) -> ResidualTerm:
    samples = sample(sampler)
    return ResidualTerm(name=name,
                        kind=kind,
                        points=samples.points,
                        required_derivs=tuple(required),
                        residual_fn=residual_fn,
                        weight=weight,
                        scale=scale,
                        normals=samples.normals)
