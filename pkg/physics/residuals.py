from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple

import torch
from torch import Tensor

from autodiff import SUPPORTED_DEGREES
from model.field import Derivative, FieldEval

ResidualFn = Callable[[FieldEval, Tensor, Optional[Tensor]], Tensor]


class TermKind(str, Enum):
    PDE = 'pde'
    DIRICHLET = 'dirichlet'
    NEUMANN = 'neumann'
    ROBIN = 'robin'
    IC = 'ic'
    DERIV_BC = 'deriv_bc'


@dataclass(frozen=True, eq=False)
class ResidualTerm:
    """One strong-form residual family evaluated on a fixed sample set.

    `residual_fn(field_eval, points, normals)` returns one residual per sample
    (shape (N,)) or per sample and component (shape (N, m)).
    """
    name: str
    kind: TermKind
    points: Tensor = field(repr=False)
    required_derivs: Tuple[Derivative, ...]
    residual_fn: ResidualFn = field(repr=False)
    weight: float = 1.0
    scale: float = 1.0
    normals: Optional[Tensor] = field(default=None, repr=False)

    def __post_init__(self):
        if self.weight <= 0:
            raise ValueError(f'term {self.name}: weight must be positive, got {self.weight}')
        if self.scale <= 0:
            raise ValueError(f'term {self.name}: scale must be positive, got {self.scale}')
        for axis, order in self.required_derivs:
            if not 1 <= order <= max(SUPPORTED_DEGREES):
                raise ValueError(f'term {self.name}: derivative order {order} on axis {axis} '
                                 f'is outside the supported jet degrees {SUPPORTED_DEGREES}')
        if self.normals is not None and self.normals.shape != self.points.shape:
            raise ValueError(f'term {self.name}: normals shape {tuple(self.normals.shape)} '
                             f'does not match points {tuple(self.points.shape)}')

    @property
    def count(self) -> int:
        return self.points.shape[0]

    def subset(self, index: Tensor) -> 'ResidualTerm':
        normals = None if self.normals is None else self.normals[index]
        return replace(self, points=self.points[index], normals=normals)

    def with_options(self, weight: float = None, scale: float = None) -> 'ResidualTerm':
        return replace(self,
                       weight=self.weight if weight is None else weight,
                       scale=self.scale if scale is None else scale)


def as_points(values: Sequence) -> Tensor:
    return torch.as_tensor(values, dtype=torch.float64)
