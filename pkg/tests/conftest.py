import pytest
import torch

from autodiff import finite_difference, relative_error
from problems.registry import get_problem

TINY_COUNTS = {
    'advection': {'pde': 20, 'ic': 20, 'bc': 20},
    'laplace': {'pde': 20, 'bottom': 20, 'top': 20, 'left': 20, 'right': 20},
    'heat': {'pde': 20, 'bc': 20},
    'beam': {'pde': 20, 'bottom_yy': 20, 'top_yy': 20, 'bottom': 20, 'top': 20, 'left': 20, 'right': 20},
}


@pytest.fixture(autouse=True, scope='session')
def float64():
    previous = torch.get_default_dtype()
    torch.set_default_dtype(torch.float64)
    yield
    torch.set_default_dtype(previous)


@pytest.fixture
def tiny_problem():
    def build(name, seed=0, **kwargs):
        return get_problem(name, seed=seed, counts=TINY_COUNTS[name], **kwargs)
    return build


def extrapolated_difference(fn, x, index, step):
    coarse = finite_difference(fn, x, index, step)
    fine = finite_difference(fn, x, index, step / 2)
    return (4.0 * fine - coarse) / 3.0


@pytest.fixture(scope='session')
def gradient_check():
    """Compare gradient `values` of scalar `fn` at `x` with Richardson-extrapolated central differences.

    Components of at least `cutoff` times the largest one must agree to
    `tolerance` relative error; smaller ones to `tolerance * cutoff * largest`
    absolute error. Returns how many were compared relatively.
    """
    def check(fn, x, values, indices, tolerance=1e-5, cutoff=1e-4, step=1e-3):
        largest = float(values.abs().max())
        compared = 0
        for index in indices:
            got = float(values[index])
            estimate = extrapolated_difference(fn, x, index, step)
            if abs(got) >= cutoff * largest:
                assert relative_error(got, estimate, floor=1e-8) < tolerance, (index, got, estimate)
                compared += 1
            else:
                assert abs(got - estimate) <= tolerance * cutoff * largest, (index, got, estimate)
        return compared
    return check
