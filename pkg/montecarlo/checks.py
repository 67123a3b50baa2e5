"""Exact and statistical checks of the weighted empirical-risk estimator.

For i.i.d. draws xi_1..xi_N from a discrete measure, J_hat = (1/N) sum_p
||W r(xi_p)||^2. Exact checks build the full distribution of J_hat by
convolving the one-draw distribution N times (the same numbers as
enumerating all |support|^N outcomes, which bounds the problem size).
"""
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Sequence

import numpy as np
import pandas as pd

from .measures import DiscreteMeasure, WeightMatrix, energies, objective, residual_norm4

logger = logging.getLogger(__name__)

ENUMERATION_LIMIT = 10 ** 6
MONOTONE_FACTOR = 2.0

Distribution = Dict[Fraction, Fraction]


def _check_size(atoms: int, n: int):
    if n < 1:
        raise ValueError(f'sample size must be at least 1, got {n}')
    if atoms ** n > ENUMERATION_LIMIT:
        raise ValueError(f'{atoms}^{n} outcomes exceed the enumeration bound {ENUMERATION_LIMIT}')


def sum_distribution(probs: Sequence[Fraction], values: Sequence[Fraction], n: int) -> Distribution:
    """Exact law of the sum of n i.i.d. draws taking values[i] with probability probs[i]."""
    _check_size(len(values), n)
    single = defaultdict(Fraction)
    for p, v in zip(probs, values):
        if p:
            single[v] += p
    law = {Fraction(0): Fraction(1)}
    for _ in range(n):
        step = defaultdict(Fraction)
        for total, p in law.items():
            for v, q in single.items():
                step[total + v] += p * q
        law = step
    return dict(law)


def estimator_distribution(measure: DiscreteMeasure, residuals: Sequence, weights: WeightMatrix,
                           n: int) -> Distribution:
    law = sum_distribution(measure.weights, energies(residuals, weights), n)
    return {total / n: p for total, p in law.items()}


def _mean(law: Distribution) -> Fraction:
    return sum(value * p for value, p in law.items())


def _variance(law: Distribution) -> Fraction:
    mean = _mean(law)
    return sum((value - mean) ** 2 * p for value, p in law.items())


def exact_estimator_mean(measure: DiscreteMeasure, residuals: Sequence, weights: WeightMatrix,
                         n: int) -> Fraction:
    return _mean(estimator_distribution(measure, residuals, weights, n))


@dataclass
class VarianceCheck:
    lhs: Fraction
    rhs: Fraction
    holds: bool
    identity: bool

    def __str__(self):
        return f'Var={float(self.lhs):.6g} <= {float(self.rhs):.6g}: {self.holds}'


def variance_bound_check(measure: DiscreteMeasure, residuals: Sequence, weights: WeightMatrix,
                         n: int) -> VarianceCheck:
    """Exact Var(J_hat) against ||W||_op^4 E||r||^4 / N; `identity` is Var(J_hat) == Var(phi) / N."""
    lhs = _variance(estimator_distribution(measure, residuals, weights, n))
    single = _variance(estimator_distribution(measure, residuals, weights, 1))
    moment = sum(p * residual_norm4(r, len(weights)) for p, r in zip(measure.weights, residuals))
    rhs = weights.op_norm ** 4 * moment / n
    return VarianceCheck(lhs=lhs,
                         rhs=rhs,
                         holds=float(lhs - rhs) <= 1e-15,
                         identity=lhs == single / n)


def likelihood_ratio(mu: DiscreteMeasure, pi: DiscreteMeasure) -> List[Fraction]:
    if len(mu) != len(pi):
        raise ValueError(f'measures live on {len(mu)} and {len(pi)} atoms')
    ratio = []
    for i, (m, p) in enumerate(zip(mu.weights, pi.weights)):
        if m > 0 and p == 0:
            raise ValueError(f'mu is not absolutely continuous with respect to pi: atom {i} has '
                             f'mu={m} but pi=0')
        ratio.append(m / p if p else Fraction(0))
    return ratio


def importance_sampling_mean(mu: DiscreteMeasure, pi: DiscreteMeasure, residuals: Sequence,
                             weights: WeightMatrix, n: int) -> Fraction:
    """Exact E_pi of (1/N) sum w(xi) phi(xi) with w = dmu/dpi."""
    ratio = likelihood_ratio(mu, pi)
    values = [w * phi for w, phi in zip(ratio, energies(residuals, weights))]
    law = sum_distribution(pi.weights, values, n)
    return _mean({total / n: p for total, p in law.items()})


@dataclass
class SLLNReport:
    schedule: List[int]
    median_error: List[float]
    shrink: List[float]
    monotone: bool
    errors: np.ndarray = field(repr=False)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'n': self.schedule,
                             'median_error': self.median_error,
                             'shrink': [math.nan] + self.shrink})


def slln_trend(measure: DiscreteMeasure, residuals: Sequence, weights: WeightMatrix,
               schedule: Sequence[int], seeds: Sequence[int]) -> SLLNReport:
    """Median over seeds of |J_hat_N - J| along an increasing schedule of N."""
    schedule = list(schedule)
    if any(b <= a for a, b in zip(schedule, schedule[1:])) or schedule[0] < 1:
        raise ValueError(f'the sample-size schedule must be positive and increasing, got {schedule}')
    if not seeds:
        raise ValueError('at least one seed is needed')

    phi = np.array([float(v) for v in energies(residuals, weights)])
    target = float(objective(measure, residuals, weights))
    probs = measure.as_array()

    errors = np.empty((len(schedule), len(seeds)))
    for i, n in enumerate(schedule):
        for j, seed in enumerate(seeds):
            draws = np.random.default_rng([seed, n]).choice(len(probs), size=n, p=probs)
            errors[i, j] = abs(phi[draws].mean() - target)
    median = np.median(errors, axis=1)

    shrink = [float(a / b) if b > 0 else (1.0 if a == 0 else math.inf) for a, b in zip(median, median[1:])]
    monotone = all(b <= MONOTONE_FACTOR * a or b == 0 for a, b in zip(median, median[1:]))
    logger.debug(f'SLLN medians {median.tolist()} over {len(seeds)} seeds')
    return SLLNReport(schedule=schedule, median_error=median.tolist(), shrink=shrink,
                      monotone=monotone, errors=errors)


@dataclass
class InvarianceReport:
    theta_star: float
    values: Dict[int, List[Fraction]]
    argmins: Dict[int, float]
    holds: bool


def minimizer_invariance_check(family: Callable[[float], Sequence],
                               measure: DiscreteMeasure,
                               theta_star: float,
                               thetas: Sequence[float],
                               weight_list: Sequence[WeightMatrix]) -> InvarianceReport:
    """J_W(theta*) = 0 and theta* is the unique argmin over `thetas`, for every W."""
    thetas = list(thetas)
    if theta_star not in thetas:
        thetas.append(theta_star)
    if any(objective(measure, family(theta_star), w) != 0 for w in weight_list):
        raise ValueError(f'the family has a nonzero residual at theta*={theta_star}')

    values, argmins = {}, {}
    holds = True
    for index, w in enumerate(weight_list):
        row = [objective(measure, family(theta), w) for theta in thetas]
        values[index] = row
        argmins[index] = thetas[int(np.argmin([float(v) for v in row]))]
        holds &= argmins[index] == theta_star
        holds &= all(v > 0 for theta, v in zip(thetas, row) if theta != theta_star)
    return InvarianceReport(theta_star=theta_star, values=values, argmins=argmins, holds=bool(holds))
