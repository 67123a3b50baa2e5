import torch
import torch.nn as nn

from autodiff import TaylorJet, jet_tanh
from . import PhysicsNet


class MLP(PhysicsNet):
    """Baseline perceptron stack, z_{l+1} = tanh(W_l z_l + b_l)."""
    arch = 'mlp'

    def __init__(self,
                 in_dim: int = 2,
                 out_dim: int = 1,
                 width: int = 64,
                 depth: int = 4,
                 gates: str = None):
        # gates are accepted so both architectures share one constructor signature
        super(MLP, self).__init__(in_dim, out_dim, width, depth)

    def _build_layers(self) -> nn.ModuleList:
        return nn.ModuleList([nn.Linear(self.width, self.width, dtype=torch.float64)
                              for _ in range(self.depth)])

    def hidden(self, z: TaylorJet) -> TaylorJet:
        for layer in self.layers:
            z = jet_tanh(z.linear(layer.weight, layer.bias))
        return z
