"""Univariate Taylor-mode forward differentiation.

A `TaylorJet` carries the truncated Taylor coefficients of a quantity along
one input direction. Coefficients are float64 tensors of identical shape (a
batch of points, optionally times channels), and every coefficient stays on
the torch autograd graph, so a parameter gradient of any derivative is one
`backward` call away.

    jet = lift_points(points, axis=1, degree=4)
    u = forward(params, jet)
    u_yyyy = u.derivative(4)
"""
import math
from typing import Callable, Dict, List, Sequence, Union

import torch
import torch.nn.functional as F
from torch import Tensor

from . import ops

SUPPORTED_DEGREES = (1, 2, 4)
MAX_DEGREE = max(SUPPORTED_DEGREES)

Scalar = Union[float, int, Tensor]


def required_degree(order: int) -> int:
    """Smallest supported jet degree that exposes derivatives up to `order`."""
    for degree in SUPPORTED_DEGREES:
        if order <= degree:
            return degree
    raise ValueError(f'derivative order {order} exceeds the supported jet degrees {SUPPORTED_DEGREES}')


def check_degree(degree: int):
    if degree not in SUPPORTED_DEGREES:
        raise ValueError(f'jet degree must be one of {SUPPORTED_DEGREES}, got {degree}')


class TaylorJet:
    __slots__ = ('coeffs',)

    def __init__(self, coeffs: Sequence[Tensor]):
        if len(coeffs) == 0 or len(coeffs) > MAX_DEGREE + 1:
            raise ValueError(f'a jet holds between 1 and {MAX_DEGREE + 1} coefficients, got {len(coeffs)}')
        self.coeffs: List[Tensor] = list(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self) -> Tensor:
        return self.coeffs[0]

    @property
    def shape(self) -> torch.Size:
        return self.coeffs[0].shape

    def derivative(self, order: int) -> Tensor:
        """k-th directional derivative, k! times the k-th coefficient."""
        if order > self.degree:
            raise ValueError(f'order {order} requested from a degree-{self.degree} jet')
        return math.factorial(order) * self.coeffs[order]

    def _like(self, other: 'TaylorJet'):
        if other.degree != self.degree:
            raise ValueError(f'jet degree mismatch: {self.degree} vs {other.degree}')

    def __add__(self, other):
        if isinstance(other, TaylorJet):
            self._like(other)
            return TaylorJet([ops.add(a, b) for a, b in zip(self.coeffs, other.coeffs)])
        return TaylorJet([ops.add(self.coeffs[0], other)] + self.coeffs[1:])

    __radd__ = __add__

    def __neg__(self):
        return TaylorJet([ops.neg(c) for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TaylorJet):
            self._like(other)
            a, b = self.coeffs, other.coeffs
            return TaylorJet([sum(ops.mul(a[i], b[k - i]) for i in range(k + 1))
                              for k in range(self.degree + 1)])
        return self.scale(other)

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar):
        if isinstance(other, TaylorJet):
            raise TypeError('division by a jet is not supported')
        return TaylorJet([ops.div(c, other) for c in self.coeffs])

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 1:
            raise ValueError(f'jets support positive integer powers, got {n!r}')
        result = self
        for _ in range(n - 1):
            result = result * self
        return result

    def scale(self, factor: Scalar) -> 'TaylorJet':
        """Multiply by a quantity constant along the jet direction (a gate, a weight, a number)."""
        return TaylorJet([ops.mul(c, factor) for c in self.coeffs])

    def linear(self, weight: Tensor, bias: Tensor = None) -> 'TaylorJet':
        """Affine map over the last axis; the bias only shifts the value coefficient."""
        return TaylorJet([F.linear(self.coeffs[0], weight, bias)] +
                         [F.linear(c, weight) for c in self.coeffs[1:]])

    def affine(self, scale: Tensor, shift: Tensor) -> 'TaylorJet':
        """Fixed per-coordinate rescaling x -> scale * x + shift."""
        return TaylorJet([self.coeffs[0] * scale + shift] + [c * scale for c in self.coeffs[1:]])

    def select(self, index: int) -> 'TaylorJet':
        return TaylorJet([c[..., index] for c in self.coeffs])

    def __getitem__(self, index):
        return TaylorJet([c[index] for c in self.coeffs])

    def detach(self) -> 'TaylorJet':
        return TaylorJet([c.detach() for c in self.coeffs])

    def __repr__(self):
        return f'TaylorJet(degree={self.degree}, shape={tuple(self.shape)})'


def jet_constant(value: Scalar, degree: int) -> TaylorJet:
    value = torch.as_tensor(value, dtype=torch.float64)
    return TaylorJet([value] + [torch.zeros_like(value) for _ in range(degree)])


def jet_lift(point: Scalar, degree: int) -> TaylorJet:
    """Seed jet of the differentiated coordinate: coefficients [point, 1, 0, ...]."""
    check_degree(degree)
    point = torch.as_tensor(point, dtype=torch.float64)
    coeffs = [point, torch.ones_like(point)] + [torch.zeros_like(point) for _ in range(degree - 1)]
    return TaylorJet(coeffs)


def lift_points(points: Tensor, axis: int, degree: int) -> TaylorJet:
    """Lift a batch of points (..., d) along coordinate `axis`; the others become constants."""
    check_degree(degree)
    if not 0 <= axis < points.shape[-1]:
        raise ValueError(f'axis {axis} out of range for {points.shape[-1]}-dimensional points')
    seed = torch.zeros_like(points)
    seed[..., axis] = 1.0
    return TaylorJet([points, seed] + [torch.zeros_like(points) for _ in range(degree - 1)])


def stack_jets(jets: Sequence[TaylorJet]) -> TaylorJet:
    """Combine one jet per input coordinate into a jet over (..., d)."""
    degrees = {jet.degree for jet in jets}
    if len(degrees) != 1:
        raise ValueError(f'input jets must share one degree, got {sorted(degrees)}')
    degree = degrees.pop()
    return TaylorJet([torch.stack([jet.coeffs[k] for jet in jets], dim=-1) for k in range(degree + 1)])


def _ode_compose(a: TaylorJet, y0: Tensor, slope: Callable[[List[Tensor], int], Tensor]) -> TaylorJet:
    """Coefficients of y = f(a) from y' = s(y) a', i.e. k y_k = sum_j j a_j s_{k-j}.

    `slope(ys, m)` returns the m-th coefficient of s given y_0..y_m.
    """
    ys = [y0]
    slopes = []
    for k in range(1, a.degree + 1):
        slopes.append(slope(ys, k - 1))
        acc = sum(ops.mul(j * a.coeffs[j], slopes[k - j]) for j in range(1, k + 1))
        ys.append(acc / k)
    return TaylorJet(ys)


def _cauchy(xs: List[Tensor], m: int) -> Tensor:
    return sum(ops.mul(xs[i], xs[m - i]) for i in range(m + 1))


def jet_exp(a: TaylorJet) -> TaylorJet:
    return _ode_compose(a, ops.exp(a.value), lambda ys, m: ys[m])


def jet_tanh(a: TaylorJet) -> TaylorJet:
    # t' = (1 - t^2) a'
    def slope(ys, m):
        s = -_cauchy(ys, m)
        return s + 1.0 if m == 0 else s
    return _ode_compose(a, ops.tanh(a.value), slope)


def jet_sigmoid(a: TaylorJet) -> TaylorJet:
    # s' = s (1 - s) a'
    return _ode_compose(a, ops.sigmoid(a.value), lambda ys, m: ys[m] - _cauchy(ys, m))


def jet_softplus(a: TaylorJet) -> TaylorJet:
    # softplus' = sigmoid, so the slope series is the sigmoid jet itself
    sig = jet_sigmoid(a)
    return _ode_compose(a, ops.softplus(a.value), lambda ys, m: sig.coeffs[m])


JET_FUNCTIONS: Dict[str, Callable[[TaylorJet], TaylorJet]] = {
    'exp': jet_exp,
    'tanh': jet_tanh,
    'sigmoid': jet_sigmoid,
    'softplus': jet_softplus,
}


def jet_elementwise(fn: str, jet: TaylorJet) -> TaylorJet:
    try:
        return JET_FUNCTIONS[fn](jet)
    except KeyError:
        raise ValueError(f'unknown jet function {fn!r}; choose among {sorted(JET_FUNCTIONS)}') from None
