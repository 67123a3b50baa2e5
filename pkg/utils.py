import copy
import json
import logging
import random
import subprocess
from pathlib import Path
from typing import Optional, Union

import numpy as np
import torch
import yaml

from solver.utils import Config

logger = logging.getLogger(__name__)

VERSION = '1.0.0'
MANIFEST_NAME = 'manifest.json'

DEFAULT_CONFIG = {
    'problem': None,
    'model': {'arch': 'lnn', 'width': 64, 'depth': 4, 'gates': 'channel'},
    'train': {'iters': None, 'lr': 1e-3, 'beta1': 0.9, 'beta2': 0.999, 'eps': 1e-8,
              'batch_fraction': 1.0, 'seed': 0},
    'problem_constants': {},
    'problem_options': {},
    'counts': {},
    'weights': {},
}


def read_config_yaml(config_path: str) -> Config:
    with open(config_path) as stream:
        try:
            config_dict = yaml.safe_load(stream)
        except yaml.YAMLError as exc:
            raise ValueError(f'config_path {config_path} cannot be read: {exc}') from exc
    if not isinstance(config_dict, dict):
        raise ValueError(f'config_path {config_path} does not hold a mapping')
    return Config(config_dict)


def merge_config(base: dict, overrides: Optional[dict]) -> dict:
    """Recursive merge; keys of `overrides` win, nested sections are merged rather than replaced."""
    merged = copy.deepcopy(base)
    for key, value in (overrides or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_config(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def load_run_config(config_path: Optional[str] = None, overrides: Optional[dict] = None) -> Config:
    """Built-in defaults < YAML file < command-line overrides (None values are skipped)."""
    config = DEFAULT_CONFIG
    if config_path is not None:
        config = merge_config(config, read_config_yaml(config_path).to_dict())
    cleaned = {section: {k: v for k, v in values.items() if v is not None} if isinstance(values, dict) else values
               for section, values in (overrides or {}).items() if values is not None}
    return Config(merge_config(config, cleaned))


def describe_version() -> str:
    """`git describe` of the working tree, or the package version outside a checkout."""
    try:
        out = subprocess.run(['git', 'describe', '--always', '--dirty', '--tags'],
                             cwd=Path(__file__).resolve().parent,
                             capture_output=True, text=True, timeout=5, check=True)
        return out.stdout.strip() or VERSION
    except (OSError, subprocess.SubprocessError):
        return VERSION


def write_manifest(output_dir: Union[str, Path], manifest: dict, name: str = MANIFEST_NAME) -> Path:
    path = Path(output_dir, name)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as outfile:
        outfile.write(json.dumps({'version': describe_version(), **manifest}, indent=4, sort_keys=True))
    return path


def configure_logging(verbose: bool = False):
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')


def set_determinism(seed: int):
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True)
    torch.set_default_dtype(torch.float64)


class DummyPoolExecutor:
    class DummyResult:
        def __init__(self, func, *args, **kwargs):
            self.func = func
            self.args = args
            self.kwargs = kwargs

        def result(self):
            return self.func(*self.args, **self.kwargs)

    def __init__(self, workers=0):
        pass

    def submit(self, func, *args, **kwargs):
        return DummyPoolExecutor.DummyResult(func, *args, **kwargs)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_value, exc_tb):
        return
