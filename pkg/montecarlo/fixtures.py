"""Built-in measures and the check table printed by `mc-verify`."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

import numpy as np
import pandas as pd

from .checks import (exact_estimator_mean, importance_sampling_mean, minimizer_invariance_check, slln_trend,
                     variance_bound_check)
from .measures import DiscreteMeasure, WeightMatrix, objective

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)

# two atoms with phi = ||r||^2 = 1 and 3 under the identity weight
TWO_POINT = DiscreteMeasure(support=('a', 'b'), probs=(HALF, HALF))
TWO_POINT_RESIDUALS = [(1, 0, 0), (1, 1, 1)]
IDENTITY3 = WeightMatrix.identity(3)
SKEWED = DiscreteMeasure(support=('a', 'b'), probs=(Fraction(1, 4), Fraction(3, 4)))

SLLN_SCHEDULE = (10, 100, 1000)
SLLN_SEEDS = tuple(range(101))
SHRINK_RANGE = (2.0, 5.0)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    table: Optional[pd.DataFrame] = None


def _unbiasedness() -> CheckResult:
    target = objective(TWO_POINT, TWO_POINT_RESIDUALS, IDENTITY3)
    means = {n: exact_estimator_mean(TWO_POINT, TWO_POINT_RESIDUALS, IDENTITY3, n) for n in (1, 2, 6)}
    return CheckResult('unbiasedness', all(m == target for m in means.values()),
                       f'J={target}, E[J_hat]={", ".join(f"N={n}: {m}" for n, m in means.items())}')


def _variance() -> CheckResult:
    check = variance_bound_check(TWO_POINT, TWO_POINT_RESIDUALS, IDENTITY3, 2)
    return CheckResult('variance_bound', check.holds and check.identity and check.lhs == HALF,
                       f'Var={check.lhs} <= {check.rhs}, Var(phi)/N identity: {check.identity}')


def _importance_sampling() -> CheckResult:
    target = objective(TWO_POINT, TWO_POINT_RESIDUALS, IDENTITY3)
    mean = importance_sampling_mean(TWO_POINT, SKEWED, TWO_POINT_RESIDUALS, IDENTITY3, 3)
    return CheckResult('importance_sampling', mean == target, f'E_pi[J_IS]={mean}, J={target}')


def _slln() -> CheckResult:
    report = slln_trend(TWO_POINT, TWO_POINT_RESIDUALS, IDENTITY3, SLLN_SCHEDULE, SLLN_SEEDS)
    lo, hi = SHRINK_RANGE
    passed = report.monotone and all(lo <= s <= hi for s in report.shrink)
    medians = ', '.join(f'{m:.3e}' for m in report.median_error)
    shrink = ', '.join(f'{s:.2f}' for s in report.shrink)
    return CheckResult('slln_trend', passed, f'median errors {medians}; shrink per decade {shrink}',
                       table=report.to_frame())


def _invariance() -> CheckResult:
    uniform = DiscreteMeasure.uniform((1, 2))

    def family(theta):
        return [(Fraction(theta) * x,) for x in uniform.support]

    weights = [WeightMatrix.identity(1), WeightMatrix(diag=(Fraction(1, 10),)), WeightMatrix(diag=(7,))]
    thetas = [float(t) for t in np.linspace(-1.0, 1.0, 9)]
    report = minimizer_invariance_check(family, uniform, 0.0, thetas, weights)
    return CheckResult('minimizer_invariance', report.holds,
                       f'argmin theta per W: {sorted(set(report.argmins.values()))}')


CHECKS = (_unbiasedness, _variance, _importance_sampling, _slln, _invariance)


def run_all() -> List[CheckResult]:
    results = []
    for check in CHECKS:
        result = check()
        logger.info(f'{result.name}: {"pass" if result.passed else "FAIL"} ({result.detail})')
        results.append(result)
    return results
