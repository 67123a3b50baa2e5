"""Flat parameter vectors for the scaffold networks.

The flat float64 vector is the single source of truth: the optimizer updates
it, `Grad` vectors are aligned with it, and `forward` binds views of it into
the module with `torch.func.functional_call`.

Parameter blob layout (little endian):

    offset  size  field
    0       8     magic b'LNNPINN\\0'
    8       4     format version (u4)
    12      4     arch tag, b'mlp\\0' or b'lnn\\0'
    16      8     gate mode, b'channel\\0' or b'layer\\0\\0\\0'
    24      4     in_dim (u4)
    28      4     out_dim (u4)
    32      4     width (u4)
    36      4     depth (u4)
    40      8     seed (i8)
    48      8     parameter count n (u8)
    56      8n    parameters (f8)
"""
import logging
import math
from collections import OrderedDict
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Sequence, Tuple, Union

import numpy as np
import torch
from torch import Tensor
from torch.func import functional_call
from torch.nn.utils import parameters_to_vector

from autodiff import TaylorJet, stack_jets
from . import PhysicsNet
from .lnn import LiquidNet
from .mlp import MLP

logger = logging.getLogger(__name__)

ARCHITECTURES = {'mlp': MLP, 'lnn': LiquidNet}

BETA_INIT = 0.88
ALPHA_INIT = 0.5

MAGIC = b'LNNPINN\x00'
FORMAT_VERSION = 1
HEADER = np.dtype([('magic', 'S8'),
                   ('version', '<u4'),
                   ('arch', 'S4'),
                   ('gates', 'S8'),
                   ('in_dim', '<u4'),
                   ('out_dim', '<u4'),
                   ('width', '<u4'),
                   ('depth', '<u4'),
                   ('seed', '<i8'),
                   ('count', '<u8')])


def _logit(p: float) -> float:
    return math.log(p / (1.0 - p))


@dataclass(frozen=True, eq=False)
class NetworkParams:
    arch: str
    in_dim: int
    out_dim: int
    width: int
    depth: int
    seed: int
    gates: str
    flat: Tensor = field(repr=False)
    layout: Dict[str, Tuple[int, Tuple[int, ...]]] = field(repr=False, compare=False)
    module: PhysicsNet = field(repr=False, compare=False)

    @property
    def parameter_count(self) -> int:
        return self.flat.numel()

    @property
    def gate_count(self) -> int:
        return sum(math.prod(shape) for name, (_, shape) in self.layout.items() if 'raw_' in name)

    def unflatten(self, flat: Tensor = None) -> Dict[str, Tensor]:
        flat = self.flat if flat is None else flat
        if flat.numel() != self.parameter_count:
            raise ValueError(f'flat vector has {flat.numel()} entries, layout needs {self.parameter_count}')
        return OrderedDict((name, flat[offset:offset + math.prod(shape)].view(shape))
                           for name, (offset, shape) in self.layout.items())

    def with_flat(self, flat: Tensor) -> 'NetworkParams':
        return replace(self, flat=flat.detach().clone())

    def describe(self) -> str:
        return (f'{self.arch.upper()} {self.in_dim}->{self.out_dim}, width {self.width}, depth {self.depth}, '
                f'{self.parameter_count} parameters ({self.gate_count} gate parameters, {self.gates} gates)')


def _layout(module: PhysicsNet) -> Dict[str, Tuple[int, Tuple[int, ...]]]:
    layout = OrderedDict()
    offset = 0
    for name, param in module.named_parameters():
        layout[name] = (offset, tuple(param.shape))
        offset += param.numel()
    return layout


def build_module(arch: str, in_dim: int, out_dim: int, width: int, depth: int, gates: str = 'channel') -> PhysicsNet:
    try:
        klass = ARCHITECTURES[arch]
    except KeyError:
        raise ValueError(f'Wrong arch {arch!r}. Please choose among {sorted(ARCHITECTURES)}') from None
    return klass(in_dim=in_dim, out_dim=out_dim, width=width, depth=depth, gates=gates)


def init(arch: str,
         in_dim: int,
         out_dim: int,
         width: int,
         depth: int,
         seed: int,
         gates: str = 'channel') -> NetworkParams:
    """Glorot-uniform weights, zero biases, gates at sigmoid(raw_beta)=0.88 and sigmoid(raw_alpha)=0.5."""
    module = build_module(arch, in_dim, out_dim, width, depth, gates)
    generator = torch.Generator().manual_seed(seed)

    with torch.no_grad():
        for name, param in module.named_parameters():
            if name.endswith('raw_alpha'):
                param.fill_(_logit(ALPHA_INIT))
            elif name.endswith('raw_beta'):
                param.fill_(_logit(BETA_INIT))
            elif param.dim() == 2:
                fan_out, fan_in = param.shape
                bound = math.sqrt(6.0 / (fan_in + fan_out))
                param.uniform_(-bound, bound, generator=generator)
            else:
                param.zero_()

    flat = parameters_to_vector(module.parameters()).detach().clone()
    return NetworkParams(arch=arch, in_dim=in_dim, out_dim=out_dim, width=width, depth=depth,
                         seed=seed, gates=gates if arch == 'lnn' else 'channel',
                         flat=flat, layout=_layout(module), module=module)


def _as_input(inputs: Union[TaylorJet, Sequence[TaylorJet]]) -> TaylorJet:
    if isinstance(inputs, TaylorJet):
        return inputs
    return stack_jets(list(inputs))


def forward(params: NetworkParams, inputs: Union[TaylorJet, Sequence[TaylorJet]], flat: Tensor = None) -> TaylorJet:
    """Evaluate the network on input jets, with parameters taken from `flat` (default: params.flat)."""
    return functional_call(params.module, params.unflatten(flat), (_as_input(inputs),))


def forward_mlp(params: NetworkParams, inputs, flat: Tensor = None) -> TaylorJet:
    if params.arch != 'mlp':
        raise ValueError(f'forward_mlp called with {params.arch} parameters')
    return forward(params, inputs, flat)


def forward_lnn(params: NetworkParams, inputs, flat: Tensor = None) -> TaylorJet:
    if params.arch != 'lnn':
        raise ValueError(f'forward_lnn called with {params.arch} parameters')
    return forward(params, inputs, flat)


def save_params(params: NetworkParams, path: Union[str, Path]):
    header = np.zeros(1, dtype=HEADER)
    header['magic'] = MAGIC
    header['version'] = FORMAT_VERSION
    header['arch'] = params.arch.encode()
    header['gates'] = params.gates.encode()
    header['in_dim'] = params.in_dim
    header['out_dim'] = params.out_dim
    header['width'] = params.width
    header['depth'] = params.depth
    header['seed'] = params.seed
    header['count'] = params.parameter_count
    values = params.flat.detach().cpu().numpy().astype('<f8')
    Path(path).write_bytes(header.tobytes() + values.tobytes())


def load_params(path: Union[str, Path]) -> NetworkParams:
    blob = Path(path).read_bytes()
    if len(blob) < HEADER.itemsize:
        raise ValueError(f'{path} is too short to hold a parameter header')
    header = np.frombuffer(blob[:HEADER.itemsize], dtype=HEADER)[0]
    if header['magic'] != MAGIC.rstrip(b'\x00') or header['version'] != FORMAT_VERSION:
        raise ValueError(f'{path} is not a version-{FORMAT_VERSION} parameter blob')

    values = np.frombuffer(blob[HEADER.itemsize:], dtype='<f8')
    if values.size != header['count']:
        raise ValueError(f'{path} declares {header["count"]} parameters but holds {values.size}')

    params = init(arch=header['arch'].decode(),
                  in_dim=int(header['in_dim']),
                  out_dim=int(header['out_dim']),
                  width=int(header['width']),
                  depth=int(header['depth']),
                  seed=int(header['seed']),
                  gates=header['gates'].decode())
    if params.parameter_count != values.size:
        raise ValueError(f'{path} does not match the {params.arch} layout')
    logger.debug(f'Loaded {params.describe()} from {path}')
    return params.with_flat(torch.from_numpy(values.copy()))
