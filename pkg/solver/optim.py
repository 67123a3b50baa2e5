from dataclasses import dataclass
from typing import Tuple

import torch
from torch import Tensor

from .utils import DivergenceError, TrainConfig


@dataclass(frozen=True)
class AdamState:
    step: int
    m: Tensor
    v: Tensor

    @classmethod
    def zeros(cls, size: int) -> 'AdamState':
        return cls(step=0,
                   m=torch.zeros(size, dtype=torch.float64),
                   v=torch.zeros(size, dtype=torch.float64))


def adam_step(params: Tensor,
              grad: Tensor,
              state: AdamState,
              config: TrainConfig) -> Tuple[Tensor, AdamState]:
    """One bias-corrected Adam update with a constant learning rate."""
    if params.shape != grad.shape or state.m.shape != params.shape or state.v.shape != params.shape:
        raise ValueError(f'Adam state {tuple(state.m.shape)} / gradient {tuple(grad.shape)} '
                         f'do not match parameters {tuple(params.shape)}')
    bad = torch.nonzero(~torch.isfinite(grad))
    if bad.numel():
        index = int(bad[0, 0])
        raise DivergenceError(f'non-finite gradient entry at index {index}: {float(grad[index])}')

    step = state.step + 1
    m = config.beta1 * state.m + (1.0 - config.beta1) * grad
    v = config.beta2 * state.v + (1.0 - config.beta2) * grad * grad
    m_hat = m / (1.0 - config.beta1 ** step)
    v_hat = v / (1.0 - config.beta2 ** step)
    updated = params - config.lr * m_hat / (torch.sqrt(v_hat) + config.eps)
    return updated, AdamState(step=step, m=m, v=v)
