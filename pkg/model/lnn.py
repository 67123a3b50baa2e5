import torch
import torch.nn as nn
from torch.nn import Parameter

from autodiff import TaylorJet, jet_tanh
from . import PhysicsNet

GATE_MODES = ('channel', 'layer')


class LiquidBlock(nn.Module):
    """Liquid residual-gating update.

        h' = beta * h + alpha * tanh(W_h h + U z + b)

    alpha and beta are sigmoid-squashed trainable gates, either one per
    channel or a single scalar for the whole layer. A beta in (0, 1) keeps
    the skip path non-expansive.
    """

    def __init__(self,
                 width: int,
                 gates: str = 'channel'):
        super(LiquidBlock, self).__init__()
        if gates not in GATE_MODES:
            raise ValueError(f'gates must be one of {GATE_MODES}, got {gates!r}')
        size = width if gates == 'channel' else 1
        self.raw_alpha = Parameter(torch.zeros(size, dtype=torch.float64))
        self.raw_beta = Parameter(torch.zeros(size, dtype=torch.float64))
        self.hidden = nn.Linear(width, width, bias=False, dtype=torch.float64)
        self.inject = nn.Linear(width, width, dtype=torch.float64)

    @property
    def alpha(self) -> torch.Tensor:
        return torch.sigmoid(self.raw_alpha)

    @property
    def beta(self) -> torch.Tensor:
        return torch.sigmoid(self.raw_beta)

    def forward(self, h: TaylorJet, z: TaylorJet) -> TaylorJet:
        pre = h.linear(self.hidden.weight) + z.linear(self.inject.weight, self.inject.bias)
        return h.scale(self.beta) + jet_tanh(pre).scale(self.alpha)


class LiquidNet(PhysicsNet):
    """Scaffold whose hidden layers are liquid blocks, with h_0 = z_0 and an identity readout map psi."""
    arch = 'lnn'

    def __init__(self,
                 in_dim: int = 2,
                 out_dim: int = 1,
                 width: int = 64,
                 depth: int = 4,
                 gates: str = 'channel'):
        self.gates = gates
        super(LiquidNet, self).__init__(in_dim, out_dim, width, depth)

    def _build_layers(self) -> nn.ModuleList:
        return nn.ModuleList([LiquidBlock(self.width, self.gates) for _ in range(self.depth)])

    def hidden(self, z: TaylorJet) -> TaylorJet:
        h = z
        for block in self.layers:
            h = block(h, z)
            z = h
        return z
