from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Tuple, Union

import torch
from torch import Tensor

from .ops import OPS, Operand


class Node(NamedTuple):
    kind: str
    operands: Tuple[Union[int, Tensor], ...]
    value: Tensor


@dataclass
class Grad:
    """Reverse-mode partials of a scalar root, one entry per declared leaf value."""
    values: Tensor
    sizes: Tuple[int, ...]

    @property
    def finite(self) -> bool:
        return bool(torch.isfinite(self.values).all())

    def __len__(self) -> int:
        return self.values.numel()

    def wrt(self, leaf: int) -> Tensor:
        """Partials with respect to the `leaf`-th declared leaf, flattened."""
        start = sum(self.sizes[:leaf])
        return self.values[start:start + self.sizes[leaf]]


class Tape:
    """Reverse-mode recording context.

    Leaves are float64 torch tensors requiring grad; the first one declared
    through `flat` is the network parameter vector. Scalar operations issued
    through the tape methods are appended to `nodes` in topological order so
    that `replay` can re-evaluate them. Batched network and jet arithmetic uses
    the same operations directly on the leaves and is tracked by torch
    autograd, which `backward` differentiates.

        tape = Tape(params.flat)
        loss = ...                       # built from tape.params
        grad = backward(tape, loss)
    """

    def __init__(self, flat: Tensor = None):
        self.nodes: List[Node] = []
        self.leaves: List[Tensor] = []
        self._index = {}
        self.valid = True
        self.params = self.declare(flat) if flat is not None else None

    def declare(self, value: Operand) -> Tensor:
        leaf = torch.as_tensor(value, dtype=torch.float64).detach().clone().requires_grad_(True)
        self.leaves.append(leaf)
        self._push('leaf', (), leaf)
        return leaf

    def _push(self, kind: str, operands: tuple, value: Tensor) -> Tensor:
        if not bool(torch.isfinite(value.detach()).all()):
            self.valid = False
        self._index[id(value)] = len(self.nodes)
        self.nodes.append(Node(kind, operands, value))
        return value

    def _ref(self, operand: Operand):
        if isinstance(operand, Tensor) and id(operand) in self._index:
            return self._index[id(operand)]
        return torch.as_tensor(operand, dtype=torch.float64).detach()

    def _apply(self, kind: str, *operands: Operand) -> Tensor:
        refs = tuple(self._ref(op) for op in operands)
        return self._push(kind, refs, OPS[kind](*operands))

    def add(self, a: Operand, b: Operand) -> Tensor:
        return self._apply('add', a, b)

    def sub(self, a: Operand, b: Operand) -> Tensor:
        return self._apply('sub', a, b)

    def mul(self, a: Operand, b: Operand) -> Tensor:
        return self._apply('mul', a, b)

    def div(self, a: Operand, b: Operand) -> Tensor:
        return self._apply('div', a, b)

    def neg(self, a: Operand) -> Tensor:
        return self._apply('neg', a)

    def exp(self, a: Operand) -> Tensor:
        return self._apply('exp', a)

    def tanh(self, a: Operand) -> Tensor:
        return self._apply('tanh', a)

    def sigmoid(self, a: Operand) -> Tensor:
        return self._apply('sigmoid', a)

    def softplus(self, a: Operand) -> Tensor:
        return self._apply('softplus', a)

    def power(self, a: Operand, n: int) -> Tensor:
        value = OPS['power'](a, n)
        return self._push(f'power:{n}', (self._ref(a),), value)

    def replay(self) -> bool:
        """Re-evaluate every recorded node from the leaves; True if all values match bit for bit."""
        values = []
        with torch.no_grad():
            for node in self.nodes:
                if node.kind == 'leaf':
                    values.append(node.value.detach())
                    continue
                args = [values[ref] if isinstance(ref, int) else ref for ref in node.operands]
                kind, _, exponent = node.kind.partition(':')
                if exponent:
                    args.append(int(exponent))
                values.append(OPS[kind](*args))
        return all(torch.equal(v, n.value.detach()) for v, n in zip(values, self.nodes))


def backward(tape: Tape, root: Tensor, create_graph: bool = False) -> Grad:
    """Exact reverse-mode partials of a scalar `root` with respect to every declared leaf."""
    if not isinstance(root, Tensor) or root.numel() != 1:
        raise ValueError(f'backward expects a scalar root, got shape {tuple(getattr(root, "shape", ()))}')
    if not tape.leaves:
        raise ValueError('backward needs at least one declared leaf on the tape')

    grads = torch.autograd.grad(root.reshape(()), tape.leaves,
                                allow_unused=True,
                                create_graph=create_graph)
    flat = [torch.zeros_like(leaf).reshape(-1) if g is None else g.reshape(-1)
            for g, leaf in zip(grads, tape.leaves)]
    grad = Grad(values=torch.cat(flat), sizes=tuple(leaf.numel() for leaf in tape.leaves))
    if not grad.finite:
        tape.valid = False
    return grad


def finite_difference(fn: Callable[[Tensor], Tensor], x: Tensor, index: int, step: float = 1e-5) -> float:
    """Central difference of scalar `fn` along coordinate `index` of the flat vector `x`."""
    x = x.detach().clone()
    original = float(x[index])
    x[index] = original + step
    plus = float(fn(x))
    x[index] = original - step
    minus = float(fn(x))
    return (plus - minus) / (2 * step)


def relative_error(a: float, b: float, floor: float = 1e-12) -> float:
    return abs(a - b) / max(abs(a), abs(b), floor)
