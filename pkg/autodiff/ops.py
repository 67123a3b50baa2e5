"""Elementwise scalar operations shared by the tape and the Taylor jets.

Every function works on float64 tensors of any shape, so a "tape scalar" is
one entry of a batched tensor and a batch of collocation points is evaluated
with a single call.
"""
import torch
from torch import Tensor
from typing import Union

Operand = Union[Tensor, float, int]


def _as_tensor(value: Operand) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return torch.tensor(value, dtype=torch.float64)


def add(a: Operand, b: Operand) -> Tensor:
    return _as_tensor(a) + _as_tensor(b)


def sub(a: Operand, b: Operand) -> Tensor:
    return _as_tensor(a) - _as_tensor(b)


def mul(a: Operand, b: Operand) -> Tensor:
    return _as_tensor(a) * _as_tensor(b)


def div(a: Operand, b: Operand) -> Tensor:
    b = _as_tensor(b)
    if bool((b == 0).any()):
        raise ZeroDivisionError('division by an exact zero on the tape')
    return _as_tensor(a) / b


def neg(a: Operand) -> Tensor:
    return -_as_tensor(a)


def exp(a: Operand) -> Tensor:
    return torch.exp(_as_tensor(a))


def tanh(a: Operand) -> Tensor:
    return torch.tanh(_as_tensor(a))


def sigmoid(a: Operand) -> Tensor:
    return torch.sigmoid(_as_tensor(a))


def softplus(a: Operand) -> Tensor:
    # logaddexp keeps the exact gradient sigmoid(a) for every input, unlike
    # torch.nn.functional.softplus which switches to the identity above 20.
    a = _as_tensor(a)
    return torch.logaddexp(a, torch.zeros_like(a))


def power(a: Operand, n: int) -> Tensor:
    if not isinstance(n, int):
        raise ValueError(f'power expects an integer exponent, got {n!r}')
    a = _as_tensor(a)
    if n < 0 and bool((a == 0).any()):
        raise ZeroDivisionError('negative power of an exact zero on the tape')
    return a ** n


OPS = {'add': add,
       'sub': sub,
       'mul': mul,
       'div': div,
       'neg': neg,
       'exp': exp,
       'tanh': tanh,
       'sigmoid': sigmoid,
       'softplus': softplus,
       'power': power}
