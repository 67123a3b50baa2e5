from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from torch import Tensor


class Config:
    def __init__(self,
                 config_dict: dict):
        self._config_dict = config_dict
        self._update_cfg()

    def _update_cfg(self):
        for k, v in self._config_dict.items():
            setattr(self, k, Config(v) if isinstance(v, dict) else v)

    def get(self, key: str, default=None):
        return getattr(self, key, default)

    def to_dict(self) -> dict:
        return {k: v.to_dict() if isinstance(v, Config) else v
                for k, v in vars(self).items() if not k.startswith('_')}


@dataclass(frozen=True)
class TrainConfig:
    seed: int = 0
    iters: int = 1000
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_fraction: float = 1.0
    arch: str = 'lnn'
    width: int = 64
    depth: int = 4
    gates: str = 'channel'

    def __post_init__(self):
        if self.iters < 1:
            raise ValueError(f'iters must be at least 1, got {self.iters}')
        if self.lr <= 0:
            raise ValueError(f'learning rate must be positive, got {self.lr}')
        if not 0.0 < self.batch_fraction <= 1.0:
            raise ValueError(f'batch fraction must lie in (0, 1], got {self.batch_fraction}')
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError(f'Adam betas must lie in [0, 1), got {self.beta1}, {self.beta2}')
        if self.eps <= 0:
            raise ValueError(f'Adam eps must be positive, got {self.eps}')

    @property
    def batch_mode(self) -> str:
        return 'full' if self.batch_fraction == 1.0 else 'fraction'

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunRecord:
    """Loss history of one training run: one row per completed step."""
    terms: List[str]
    history: List[Dict[str, float]] = field(default_factory=list)
    params: Optional[Tensor] = None
    wall_time: float = 0.0
    status: str = 'running'

    def append(self, step: int, total: float, breakdown: Dict[str, float]):
        row = {'step': step, 'total': total}
        row.update(breakdown)
        self.history.append(row)

    def __len__(self) -> int:
        return len(self.history)

    @property
    def totals(self) -> np.ndarray:
        return np.array([row['total'] for row in self.history], dtype=np.float64)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.history, columns=['step', 'total'] + list(self.terms))

    def save_history(self, path):
        self.to_frame().to_csv(path, index=False, float_format='%.17g')


class DivergenceError(FloatingPointError):
    """Raised when the loss or its gradient stops being finite; `record` keeps the steps done so far."""

    def __init__(self, message: str, record: Optional[RunRecord] = None):
        super().__init__(message)
        self.record = record

