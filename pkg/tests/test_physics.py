import math

import pytest
import torch
from hypothesis import given, settings, strategies as st

from model.field import AnalyticField, NetworkField
from model.params import init
from physics import (ResidualTerm, ScaleSet, TermKind, UNIT_SCALES, as_points, balance_report, component_mse,
                     composite_loss, compute_scales, residuals, weight_matrix)
from problems.laplace import laplace_mixed

ZERO = AnalyticField(lambda x: x.select(0) * 0.0)


def constant_term(name, values, kind=TermKind.PDE, weight=1.0, scale=1.0):
    values = torch.tensor(values, dtype=torch.float64)
    return ResidualTerm(name=name,
                        kind=kind,
                        points=torch.zeros(len(values), 2),
                        required_derivs=(),
                        residual_fn=lambda u, points, normals: values,
                        weight=weight,
                        scale=scale)


class TestScales:
    def test_identity_scaling(self):
        scales = compute_scales(1.0, 1.0, 1.0, 1.0, [(1.0, 2, 0)])
        assert (scales.s_omega, scales.s_d, scales.s_n) == (1.0, 1.0, 1.0)
        assert scales.provenance == 'appendix_A'

    def test_heat_flux_scale(self):
        scales = compute_scales(l_ref=0.15, t_ref=1.0, u_ref=1.0, k_star=159.0, coefficients=[(159.0, 2, 0)])
        assert scales.s_n == pytest.approx(1060.0, rel=1e-12)
        assert scales.s_omega == pytest.approx(159.0 / 0.0225, rel=1e-12)
        assert scales.s_d == 1.0

    def test_mixed_space_time_coefficients(self):
        scales = compute_scales(2.0, 0.5, 3.0, 1.0, [(1.0, 1, 0), (-2.0, 0, 1)])
        assert scales.s_omega == pytest.approx(3.0 * (0.5 + 4.0))

    @pytest.mark.parametrize('kwargs', [{'l_ref': 0.0}, {'t_ref': -1.0}, {'u_ref': 0.0}, {'k_star': 0.0}])
    def test_nonpositive_reference(self, kwargs):
        args = {'l_ref': 1.0, 't_ref': 1.0, 'u_ref': 1.0, 'k_star': 1.0, 'coefficients': [(1.0, 2, 0)]}
        args.update(kwargs)
        with pytest.raises(ValueError):
            compute_scales(**args)

    def test_needs_coefficients(self):
        with pytest.raises(ValueError):
            compute_scales(1.0, 1.0, 1.0, 1.0, [])

    def test_unit_provenance_is_all_ones(self):
        assert UNIT_SCALES == ScaleSet(1.0, 1.0, 1.0, 'unit')
        with pytest.raises(ValueError):
            ScaleSet(s_omega=2.0)
        with pytest.raises(ValueError):
            ScaleSet(provenance='guess')


class TestResidualTerm:
    def test_single_sample(self):
        assert float(component_mse(constant_term('pde', [3.0]), ZERO)) == 9.0

    def test_scale_divides_residual(self):
        assert float(component_mse(constant_term('pde', [3.0], scale=3.0), ZERO)) == 1.0

    def test_vector_residual_sums_components(self):
        values = torch.tensor([[1.0, 2.0], [0.0, 2.0]])
        term = ResidualTerm('pde', TermKind.PDE, torch.zeros(2, 2), (), lambda u, p, n: values)
        assert float(component_mse(term, ZERO)) == pytest.approx(4.5)

    @pytest.mark.parametrize('kwargs', [{'weight': 0.0}, {'scale': -1.0}])
    def test_nonpositive_options(self, kwargs):
        with pytest.raises(ValueError):
            constant_term('pde', [1.0], **kwargs)

    def test_derivative_order_limit(self):
        with pytest.raises(ValueError):
            ResidualTerm('pde', TermKind.PDE, torch.zeros(1, 2), ((0, 5),), lambda u, p, n: u.value)

    def test_normals_shape(self):
        with pytest.raises(ValueError):
            ResidualTerm('bc', TermKind.ROBIN, torch.zeros(3, 2), (), lambda u, p, n: u.value,
                         normals=torch.zeros(2, 2))

    def test_subset(self):
        term = ResidualTerm('bc', TermKind.ROBIN, as_points([[0.0, 1.0], [1.0, 0.0], [0.0, -1.0]]), (),
                            lambda u, p, n: u.value, normals=as_points([[0.0, 1.0], [1.0, 0.0], [0.0, -1.0]]))
        picked = term.subset(torch.tensor([2, 0]))
        assert picked.count == 2
        assert torch.equal(picked.normals, as_points([[0.0, -1.0], [0.0, 1.0]]))

    def test_with_options(self):
        term = constant_term('pde', [1.0]).with_options(weight=4.0)
        assert (term.weight, term.scale) == (4.0, 1.0)


class TestCompositeLoss:
    def test_all_zero(self):
        total, breakdown = composite_loss([constant_term('pde', [0.0, 0.0])], ZERO)
        assert float(total) == 0.0
        assert list(breakdown) == ['pde']

    def test_weighted_sum(self):
        terms = [constant_term('pde', [2.0, 0.0]),
                 constant_term('bc', [3.0, 0.0, 0.0], kind=TermKind.DIRICHLET, weight=10.0)]
        total, breakdown = composite_loss(terms, ZERO)
        assert float(breakdown['pde']) == 2.0
        assert float(breakdown['bc']) == 3.0
        assert float(total) == 32.0

    def test_needs_pde_term(self):
        with pytest.raises(ValueError):
            composite_loss([constant_term('bc', [1.0], kind=TermKind.DIRICHLET)], ZERO)

    def test_unique_names(self):
        with pytest.raises(ValueError):
            composite_loss([constant_term('pde', [1.0]), constant_term('pde', [2.0])], ZERO)

    def test_zero_network_on_laplace(self):
        problem = laplace_mixed(seed=0, counts={'pde': 50, 'bottom': 50, 'top': 50, 'left': 50, 'right': 50})
        total, breakdown = composite_loss(problem.terms, ZERO)
        assert float(breakdown['top']) == 1.0
        assert all(float(breakdown[name]) == 0.0 for name in ('pde', 'bottom', 'left', 'right'))
        assert float(total) == pytest.approx(sum(float(v) for v in breakdown.values()))

    @given(st.permutations(range(5)))
    @settings(max_examples=20, deadline=None)
    def test_term_order_does_not_matter(self, order):
        counts = {name: 20 for name in ('pde', 'bottom', 'top', 'left', 'right')}
        problem = laplace_mixed(seed=0, counts=counts, weights={'top': 3.0, 'left': 0.5})
        field = NetworkField(init('lnn', 2, 1, 4, 1, seed=0), bounds=problem.bounds)
        total, breakdown = composite_loss(problem.terms, field)
        shuffled = [problem.terms[i] for i in order]
        other_total, other_breakdown = composite_loss(shuffled, field)
        assert list(other_breakdown) == [term.name for term in shuffled]
        assert all(torch.equal(breakdown[name], other_breakdown[name]) for name in breakdown)
        assert float(other_total) == pytest.approx(float(total), rel=1e-14)

    def test_raw_residuals(self):
        problem = laplace_mixed(seed=0, counts={'pde': 5, 'bottom': 5, 'top': 5, 'left': 5, 'right': 5})
        assert torch.equal(residuals(problem.term('top'), ZERO), torch.full((5,), -1.0))

    def test_weight_matrix(self):
        terms = [constant_term('pde', [1.0], weight=4.0, scale=2.0), constant_term('bc', [1.0], scale=0.5)]
        assert weight_matrix(terms) == {'pde': 1.0, 'bc': 2.0}

    def test_weight_matrix_reproduces_loss(self):
        terms = [constant_term('pde', [1.0, 3.0], weight=4.0, scale=2.0),
                 constant_term('bc', [0.5], kind=TermKind.DIRICHLET, weight=9.0, scale=0.5)]
        diagonal = weight_matrix(terms)
        total, _ = composite_loss(terms, ZERO)
        by_matrix = sum(float((diagonal[t.name] * residuals(t, ZERO)).pow(2).mean()) for t in terms)
        assert float(total) == pytest.approx(by_matrix, rel=1e-14)


class TestBalance:
    def test_equal_components(self):
        report = balance_report([constant_term('pde', [1.0]), constant_term('bc', [-1.0])], ZERO)
        assert report.kappa == 1.0
        assert not report.degenerate

    def test_spread(self):
        report = balance_report([constant_term('pde', [1.0]), constant_term('bc', [2.0])], ZERO)
        assert report.kappa == 4.0
        assert 'kappa=4.000e+00' in str(report)

    def test_vanishing_component(self):
        report = balance_report([constant_term('pde', [1.0]), constant_term('bc', [0.0])], ZERO)
        assert math.isinf(report.kappa)
        assert report.degenerate
