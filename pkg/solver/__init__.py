import json
import logging
from pathlib import Path
from typing import Optional

from model.params import NetworkParams, save_params
from problems import ProblemDef
from .utils import Config, DivergenceError, RunRecord, TrainConfig

logger = logging.getLogger(__name__)


class Solver(object):
    def __init__(self,
                 problem: ProblemDef,
                 config: TrainConfig,
                 output_dir: Optional[str] = None):

        self._problem = problem
        self._config = config
        self._output_dir = output_dir

        self._params = None
        self._record = RunRecord(terms=[term.name for term in problem.terms])

    def train(self,
              step: int) -> float:
        raise NotImplementedError()

    def fit(self) -> RunRecord:
        raise NotImplementedError()

    @property
    def problem(self) -> ProblemDef:
        return self._problem

    @property
    def config(self) -> TrainConfig:
        return self._config

    @property
    def params(self) -> NetworkParams:
        return self._params

    @property
    def record(self) -> RunRecord:
        return self._record

    def save_checkpoint(self,
                        filename: str = 'params.bin'):
        path = Path(self._output_dir, filename)
        save_params(self._params, path)
        logger.debug(f'Saved parameters to {path}')

    def save_history(self,
                     filename: str = 'loss_history.csv'):
        self._record.save_history(Path(self._output_dir, filename))

    def save_params(self,
                    params: dict,
                    filename: str = 'summary.json'):
        with open(Path(self._output_dir, filename), 'w') as outfile:
            outfile.write(json.dumps(params, indent=4, sort_keys=True))
