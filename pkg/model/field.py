from typing import Callable, Dict, Iterable, Optional, Tuple

import torch
from torch import Tensor

from autodiff import TaylorJet, lift_points, required_degree
from .params import NetworkParams, forward

Derivative = Tuple[int, int]


class FieldEval:
    """Value and the requested input derivatives of a field at a batch of points.

    Derivatives are keyed by (axis, order). Asking for a derivative that was
    not requested raises, so residual code can only consume what its term
    declared.
    """

    def __init__(self,
                 value: Tensor,
                 derivs: Dict[Derivative, Tensor]):
        self.value = value
        self.derivs = derivs

    def __getitem__(self, key: Derivative) -> Tensor:
        try:
            return self.derivs[key]
        except KeyError:
            raise KeyError(f'derivative {key} was not requested; available: {sorted(self.derivs)}') from None

    def d(self, axis: int, order: int = 1) -> Tensor:
        return self[(axis, order)]

    def keys(self):
        return self.derivs.keys()


def _squeeze(t: Tensor) -> Tensor:
    return t.squeeze(-1) if t.dim() > 1 and t.shape[-1] == 1 else t


def evaluate_jets(fn: Callable[[TaylorJet], TaylorJet],
                  points: Tensor,
                  required: Iterable[Derivative]) -> FieldEval:
    """One univariate jet pass per differentiated axis, at the smallest degree that covers it."""
    required = sorted(set(required))
    max_order = {}
    for axis, order in required:
        if order < 1:
            raise ValueError(f'derivative order must be positive, got {order}')
        max_order[axis] = max(order, max_order.get(axis, 0))

    value = None
    derivs = {}
    for axis in sorted(max_order):
        out = fn(lift_points(points, axis, required_degree(max_order[axis])))
        if value is None:
            value = out.value
        for key in required:
            if key[0] == axis:
                derivs[key] = _squeeze(out.derivative(key[1]))

    if value is None:
        value = fn(TaylorJet([points])).value
    return FieldEval(_squeeze(value), derivs)


class NetworkField:
    """Field evaluator backed by a network; `flat` overrides the stored parameters (e.g. tape leaves)."""

    def __init__(self,
                 params: NetworkParams,
                 flat: Optional[Tensor] = None,
                 bounds: Optional[Tuple[Tensor, Tensor]] = None):
        self.params = params
        self.flat = flat
        self._scale = None
        self._shift = None
        if bounds is not None:
            lo, hi = (torch.as_tensor(b, dtype=torch.float64) for b in bounds)
            self._scale = 2.0 / (hi - lo)
            self._shift = -1.0 - lo * self._scale

    def _fn(self, x: TaylorJet) -> TaylorJet:
        if self._scale is not None:
            x = x.affine(self._scale, self._shift)
        return forward(self.params, x, self.flat)

    def __call__(self, points: Tensor, required: Iterable[Derivative] = ()) -> FieldEval:
        return evaluate_jets(self._fn, points, required)


class AnalyticField:
    """Closed-form field written with jet arithmetic, so derivatives go through the same code as the network."""

    def __init__(self, fn: Callable[[TaylorJet], TaylorJet]):
        self.fn = fn

    def __call__(self, points: Tensor, required: Iterable[Derivative] = ()) -> FieldEval:
        return evaluate_jets(self.fn, points, required)
