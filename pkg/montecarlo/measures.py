from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Sequence, Tuple, Union

import numpy as np

Number = Union[Fraction, int, float]
SUM_TOL = 1e-15


def exact(value: Number) -> Fraction:
    """Exact rational value of an int, Fraction or binary float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, Real):
        return Fraction(float(value))
    raise TypeError(f'cannot turn {value!r} into an exact rational')


@dataclass(frozen=True)
class DiscreteMeasure:
    """Probability measure on finitely many atoms.

    Probabilities may be Fractions (checked to sum to exactly one) or floats
    (checked to within 1e-15); either way they are used as exact rationals.
    """
    support: Tuple
    probs: Tuple[Number, ...]

    def __post_init__(self):
        object.__setattr__(self, 'support', tuple(self.support))
        object.__setattr__(self, 'probs', tuple(self.probs))
        if len(self.support) != len(self.probs) or not self.probs:
            raise ValueError(f'{len(self.support)} atoms but {len(self.probs)} probabilities')
        if any(p < 0 for p in self.probs):
            raise ValueError(f'probabilities must be nonnegative, got {self.probs}')
        total = sum(exact(p) for p in self.probs)
        if all(isinstance(p, (Fraction, int)) for p in self.probs):
            if total != 1:
                raise ValueError(f'probabilities sum to {total}, not 1')
        elif abs(float(total) - 1.0) > SUM_TOL:
            raise ValueError(f'probabilities sum to {float(total)!r}, not 1 within {SUM_TOL}')

    @classmethod
    def uniform(cls, support: Sequence) -> 'DiscreteMeasure':
        return cls(support=tuple(support), probs=tuple(Fraction(1, len(support)) for _ in support))

    def __len__(self) -> int:
        return len(self.probs)

    @property
    def weights(self) -> Tuple[Fraction, ...]:
        return tuple(exact(p) for p in self.probs)

    def as_array(self) -> np.ndarray:
        p = np.array([float(w) for w in self.weights])
        return p / p.sum()


@dataclass(frozen=True)
class WeightMatrix:
    """Diagonal W with one positive entry per residual component."""
    diag: Tuple[Number, ...]

    def __post_init__(self):
        object.__setattr__(self, 'diag', tuple(self.diag))
        if not self.diag or any(d <= 0 for d in self.diag):
            raise ValueError(f'weight matrix entries must be positive, got {self.diag}')

    @classmethod
    def identity(cls, size: int) -> 'WeightMatrix':
        return cls(diag=(1,) * size)

    def scaled(self, factor: Number) -> 'WeightMatrix':
        return WeightMatrix(diag=tuple(exact(d) * exact(factor) for d in self.diag))

    @property
    def op_norm(self) -> Fraction:
        return max(exact(d) for d in self.diag)

    def __len__(self) -> int:
        return len(self.diag)


def _components(residual, size: int) -> Tuple[Fraction, ...]:
    values = tuple(residual) if isinstance(residual, (tuple, list, np.ndarray)) else (residual,)
    if len(values) != size:
        raise ValueError(f'residual has {len(values)} components but W has {size}')
    return tuple(exact(v) for v in values)


def weighted_energy(residual, weights: WeightMatrix) -> Fraction:
    """phi = ||W r||^2 for one atom's residual vector."""
    r = _components(residual, len(weights))
    return sum((exact(w) * v) ** 2 for w, v in zip(weights.diag, r))


def residual_norm4(residual, size: int) -> Fraction:
    return sum(v ** 2 for v in _components(residual, size)) ** 2


def energies(residuals: Sequence, weights: WeightMatrix) -> Tuple[Fraction, ...]:
    return tuple(weighted_energy(r, weights) for r in residuals)


def objective(measure: DiscreteMeasure, residuals: Sequence, weights: WeightMatrix) -> Fraction:
    """J_W = sum_i p_i ||W r_i||^2."""
    if len(residuals) != len(measure):
        raise ValueError(f'{len(residuals)} residuals for {len(measure)} atoms')
    return sum(p * phi for p, phi in zip(measure.weights, energies(residuals, weights)))
