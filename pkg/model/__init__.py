import torch
import torch.nn as nn

from autodiff import TaylorJet


class PhysicsNet(nn.Module):
    """Shared scaffold: affine input layer, `depth` hidden blocks, linear readout.

    Subclasses build the hidden blocks and map a jet of width `width` through
    them; everything runs on Taylor jets so input derivatives come out of the
    same forward pass.
    """
    arch = None

    def __init__(self,
                 in_dim: int,
                 out_dim: int,
                 width: int,
                 depth: int):
        super(PhysicsNet, self).__init__()
        for name, value in (('in_dim', in_dim), ('out_dim', out_dim), ('width', width), ('depth', depth)):
            if value < 1:
                raise ValueError(f'{name} must be at least 1, got {value}')
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.width = width
        self.depth = depth

        self.input = nn.Linear(in_dim, width, dtype=torch.float64)
        self.layers = self._build_layers()
        self.readout = nn.Linear(width, out_dim, dtype=torch.float64)

    def _build_layers(self) -> nn.ModuleList:
        raise NotImplementedError()

    def hidden(self, z: TaylorJet) -> TaylorJet:
        raise NotImplementedError()

    def forward(self, x: TaylorJet) -> TaylorJet:
        if x.shape[-1] != self.in_dim:
            raise ValueError(f'{self.arch} expects {self.in_dim} input coordinates, got {x.shape[-1]}')
        z = x.linear(self.input.weight, self.input.bias)
        z = self.hidden(z)
        return z.linear(self.readout.weight, self.readout.bias)
