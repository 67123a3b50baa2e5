import pytest
import torch
from hypothesis import given, settings, strategies as st

from autodiff import Tape, backward
from model.field import NetworkField
from model.params import init
from physics import composite_loss

COORDINATES = 100


def composite(problem, params):
    def loss(flat):
        total, _ = composite_loss(problem.terms, NetworkField(params, flat, problem.bounds))
        return total
    return loss


def two_two_one(seed):
    params = init('mlp', 2, 1, width=2, depth=1, seed=3)
    generator = torch.Generator().manual_seed(seed)
    params = params.with_flat(torch.randn(params.parameter_count, generator=generator, dtype=torch.float64))
    pts = torch.rand(10, 2, generator=generator, dtype=torch.float64)

    def loss(flat):
        u = NetworkField(params, flat)(pts, [(0, 2), (1, 1)])
        return (u[(0, 2)] + u[(1, 1)] - u.value).pow(2).mean()
    return params, loss


@pytest.mark.parametrize('arch', ['mlp', 'lnn'])
@pytest.mark.parametrize('name', ['advection', 'laplace', 'heat', 'beam'])
def test_composite_loss_gradient_matches_finite_differences(name, arch, tiny_problem, gradient_check):
    problem = tiny_problem(name)
    params = init(arch, problem.input_dim, 1, width=8, depth=2, seed=0)
    loss = composite(problem, params)

    tape = Tape(params.flat)
    grad = backward(tape, loss(tape.params))
    assert grad.finite

    generator = torch.Generator().manual_seed(1)
    count = min(COORDINATES, params.parameter_count)
    indices = torch.randperm(params.parameter_count, generator=generator)[:count].tolist()
    compared = gradient_check(lambda flat: loss(flat).detach(), params.flat, grad.values, indices)
    assert compared >= count // 2


def test_two_two_one_network(gradient_check):
    params, loss = two_two_one(seed=2)
    tape = Tape(params.flat)
    grad = backward(tape, loss(tape.params))
    indices = range(params.parameter_count)
    assert gradient_check(lambda flat: loss(flat).detach(), params.flat, grad.values, indices, tolerance=1e-6) > 0


@given(st.integers(0, 2 ** 31 - 1))
@settings(max_examples=100, deadline=None)
def test_two_two_one_network_random_seeds(gradient_check, seed):
    params, loss = two_two_one(seed)
    tape = Tape(params.flat)
    grad = backward(tape, loss(tape.params))
    assert grad.finite
    indices = range(params.parameter_count)
    assert gradient_check(lambda flat: loss(flat).detach(), params.flat, grad.values, indices, tolerance=1e-6) > 0
