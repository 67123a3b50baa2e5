import logging
import math
import time
from typing import Dict, List, Optional, Tuple

import numpy as np
import torch
import tqdm
from torch import Tensor

from autodiff import Tape, backward
from model.field import NetworkField
from model.params import init
from physics import ResidualTerm, composite_loss
from problems import ProblemDef
from . import Solver
from .optim import AdamState, adam_step
from .utils import DivergenceError, RunRecord, TrainConfig

logger = logging.getLogger(__name__)


class PINNSolver(Solver):
    """Adam on the composite physics loss over sample sets drawn once per run.

    With `batch_fraction < 1` every step scores a seeded random subset of
    each term's samples instead of the full sets.
    """

    def __init__(self,
                 problem: ProblemDef,
                 config: TrainConfig,
                 output_dir: Optional[str] = None,
                 quiet: bool = True):

        super(PINNSolver, self).__init__(problem, config, output_dir)
        self._quiet = quiet
        self._params = init(arch=config.arch,
                            in_dim=problem.input_dim,
                            out_dim=1,
                            width=config.width,
                            depth=config.depth,
                            seed=config.seed,
                            gates=config.gates)
        self._state = AdamState.zeros(self._params.parameter_count)
        logger.info(f'{problem.name}: {self._params.describe()}')

    @property
    def state(self) -> AdamState:
        return self._state

    def batch(self,
              step: int) -> List[ResidualTerm]:
        if self._config.batch_mode == 'full':
            return self._problem.terms
        rng = np.random.default_rng([self._config.seed, step])
        terms = []
        for term in self._problem.terms:
            size = max(1, math.ceil(self._config.batch_fraction * term.count))
            index = np.sort(rng.choice(term.count, size=size, replace=False))
            terms.append(term.subset(torch.from_numpy(index)))
        return terms

    def loss(self,
             step: int = 0,
             flat: Tensor = None) -> Tuple[Tape, Tensor, Dict[str, Tensor]]:
        tape = Tape(self._params.flat if flat is None else flat)
        field = NetworkField(self._params, tape.params, self._problem.bounds)
        total, breakdown = composite_loss(self.batch(step), field)
        return tape, total, breakdown

    def _diverged(self, message: str) -> DivergenceError:
        self._record.status = 'diverged'
        self._record.params = self._params.flat.clone()
        logger.error(message)
        return DivergenceError(message, self._record)

    def train(self,
              step: int) -> float:
        tape, total, breakdown = self.loss(step)
        value = float(total)
        if not math.isfinite(value):
            raise self._diverged(f'{self._problem.name}: loss became {value} at step {step}')

        grad = backward(tape, total)
        self._record.append(step, value, {name: float(mse) for name, mse in breakdown.items()})
        try:
            flat, self._state = adam_step(self._params.flat, grad.values.detach(), self._state, self._config)
        except DivergenceError as exc:
            raise self._diverged(f'{self._problem.name}: {exc} at step {step}') from exc
        self._params = self._params.with_flat(flat.detach())
        return value

    def fit(self) -> RunRecord:
        start = time.time()
        t = tqdm.trange(self._config.iters, disable=self._quiet)
        t.set_description(f'Training {self._config.arch} on {self._problem.name}')
        try:
            for step in t:
                loss = self.train(step)
                t.set_postfix(loss=f'{loss:.3e}')
        finally:
            self._record.wall_time = time.time() - start

        self._record.params = self._params.flat.clone()
        self._record.status = 'completed'
        logger.info(f'{self._problem.name}: finished {len(self._record)} steps in {self._record.wall_time:.1f}s, '
                    f'final loss {self._record.history[-1]["total"]:.3e}')
        return self._record


def train(problem: ProblemDef,
          config: TrainConfig,
          quiet: bool = True) -> RunRecord:
    return PINNSolver(problem, config, quiet=quiet).fit()
