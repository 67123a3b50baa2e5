import math

import numpy as np
import pytest
import torch

from physics import TermKind, UNIT_SCALES, component_mse
from problems import EvalGrid
from problems.advection import advection_reaction
from problems.beam import poisson_beam
from problems.heat import CONSTANTS, disk_heat, heat_scales, nondimensional
from problems.laplace import laplace_mixed
from problems.registry import PROBLEMS, get_problem
from problems.sampling import Sampler, sample


def at(*point):
    return torch.tensor([point], dtype=torch.float64)


class TestAdvection:
    def test_reference_at_origin(self):
        problem = advection_reaction(seed=0)
        u = problem.reference(at(0.0, 0.0), [(0, 1), (1, 1)])
        assert float(u.value) == pytest.approx(6.0, abs=1e-14)
        assert float(u[(0, 1)]) == pytest.approx(-18.0, abs=1e-13)
        assert float(u[(1, 1)]) == pytest.approx(-12.0, abs=1e-13)

    def test_reference_matches_inflow_value(self):
        u = advection_reaction(seed=0).reference(at(2.0, 0.0))
        assert float(u.value) == pytest.approx(6.0 * math.exp(-6.0), rel=1e-14)
        assert float(u.value) == pytest.approx(0.0148725, abs=1e-7)

    def test_terms(self):
        problem = advection_reaction(seed=0)
        assert problem.sample_counts == {'pde': 2000, 'ic': 1000, 'bc': 1000}
        assert [t.kind for t in problem.terms] == [TermKind.PDE, TermKind.IC, TermKind.DIRICHLET]
        assert problem.term('pde').required_derivs == ((0, 1), (1, 1))
        assert problem.train_iters == 8000

    def test_samples_inside_domain(self):
        problem = advection_reaction(seed=0)
        pts = problem.term('pde').points
        assert bool(((pts >= 0.0) & (pts <= torch.tensor([2.0, 1.0]))).all())
        assert bool((problem.term('ic').points[:, 1] == 0.0).all())
        assert bool((problem.term('bc').points[:, 0] == 2.0).all())

    def test_rejects_constants(self):
        with pytest.raises(ValueError):
            advection_reaction(constants={'k': 1.0})


class TestLaplace:
    def test_reference(self):
        problem = laplace_mixed(seed=0)
        phi = problem.reference(at(0.0, 0.3), [(0, 1), (0, 2), (1, 2)])
        assert float(phi.value) == pytest.approx(0.3)
        assert float(phi[(0, 1)]) == 0.0
        assert float(phi[(0, 2)] + phi[(1, 2)]) == 0.0

    def test_terms(self):
        problem = laplace_mixed(seed=0)
        assert problem.sample_counts == {name: 1000 for name in ('pde', 'bottom', 'top', 'left', 'right')}
        assert problem.term('left').kind == TermKind.NEUMANN
        assert problem.term('left').required_derivs == ((0, 1),)
        assert problem.term('pde').required_derivs == ((0, 2), (1, 2))


class TestHeat:
    def test_nondimensional_groups(self):
        nd = nondimensional(CONSTANTS)
        assert nd['Q_nd'] == pytest.approx(0.28301887, abs=1e-8)
        assert nd['h_nd'] == pytest.approx(0.04716981, abs=1e-8)

    def test_centre_value(self):
        theta = disk_heat(seed=0).reference(at(0.0, 0.0))
        assert float(theta.value) == pytest.approx(3.0707547, abs=1e-7)

    def test_rim_flux_balance(self):
        nd = nondimensional(CONSTANTS)
        theta = disk_heat(seed=0).reference(at(1.0, 0.0), [(0, 1)])
        assert -float(theta[(0, 1)]) == pytest.approx(nd['Q_nd'] / 2.0, rel=1e-12)
        assert -float(theta[(0, 1)]) == pytest.approx(nd['h_nd'] * float(theta.value), rel=1e-12)

    def test_scales(self):
        problem = disk_heat(seed=0)
        assert problem.scales == heat_scales(CONSTANTS)
        assert problem.term('bc').scale == pytest.approx(1060.0)
        assert disk_heat(seed=0, scaling='unit').scales == UNIT_SCALES
        with pytest.raises(ValueError):
            disk_heat(seed=0, scaling='guess')

    def test_robin_term_carries_normals(self):
        term = disk_heat(seed=0).term('bc')
        assert term.kind == TermKind.ROBIN
        assert torch.allclose(term.normals, term.points, atol=1e-15)

    def test_counts(self):
        problem = disk_heat(seed=0)
        assert problem.sample_counts == {'pde': 3000, 'bc': 500}
        assert problem.train_iters == 50000

    def test_rejects_nonpositive_constants(self):
        with pytest.raises(ValueError):
            disk_heat(constants={'k': 0.0})

    def test_eval_grid_is_masked(self):
        pts = disk_heat(seed=0).eval_grid.points()
        assert bool((pts.pow(2).sum(dim=1) <= 1.0).all())
        assert pts.shape[0] < 101 * 101

    def test_scale_provenance(self):
        assert disk_heat(seed=0).scales.provenance == 'appendix_A'
        assert disk_heat(seed=0, scaling='unit').scales.provenance == 'unit'
        with pytest.raises(ValueError):
            disk_heat(seed=0, scaling='characteristic')

    @pytest.mark.parametrize('scaling', ['appendix_A', 'unit'])
    def test_scalings_agree_on_exact_solution(self, scaling):
        problem = disk_heat(seed=4, counts={'pde': 200, 'bc': 200}, scaling=scaling)
        for term in problem.terms:
            assert float(component_mse(term, problem.reference)) < (1e-20 if scaling == 'appendix_A' else 1e-16)


class TestBeam:
    def test_reference_at_corner(self):
        u = poisson_beam(seed=0).reference(at(1.0, 0.0), [(0, 2), (1, 2), (1, 4)])
        assert float(u[(0, 2)]) == pytest.approx(2.0, rel=1e-14)
        assert float(u[(1, 4)]) == pytest.approx(1.0, rel=1e-14)
        assert float(u[(1, 2)]) == pytest.approx(1.0, rel=1e-14)

    def test_right_edge(self):
        u = poisson_beam(seed=0).reference(at(1.0, 0.7))
        assert float(u.value) == pytest.approx(math.exp(-0.7), rel=1e-14)

    def test_terms(self):
        problem = poisson_beam(seed=0)
        assert len(problem.terms) == 7
        assert problem.term('pde').required_derivs == ((0, 2), (1, 4))
        assert problem.term('top_yy').kind == TermKind.DERIV_BC
        assert problem.term('bottom_yy').required_derivs == ((1, 2),)


class TestZeroResidual:
    @pytest.mark.parametrize('name', sorted(PROBLEMS))
    def test_reference_annihilates_every_term(self, name):
        problem = get_problem(name, seed=11)
        for term in problem.terms:
            assert float(component_mse(term, problem.reference)) < 1e-20, term.name


class TestRegistry:
    def test_unknown_problem(self):
        with pytest.raises(ValueError):
            get_problem('bogus')

    def test_unknown_count(self):
        with pytest.raises(ValueError):
            get_problem('laplace', counts={'middle': 10})

    def test_weights_reach_terms(self):
        problem = get_problem('laplace', weights={'top': 5.0})
        assert problem.term('top').weight == 5.0
        assert problem.term('bottom').weight == 1.0

    def test_unknown_term(self):
        with pytest.raises(KeyError):
            get_problem('advection').term('outflow')


class TestSampling:
    def test_disk_is_area_uniform(self):
        pts = sample(Sampler('disk', 10000, seed=0)).points
        inner = float((pts.norm(dim=1) <= 1.0 / math.sqrt(2.0)).double().mean())
        assert abs(inner - 0.5) <= 0.02

    def test_circle(self):
        samples = sample(Sampler('circle', 1000, seed=0))
        assert float((samples.points.pow(2).sum(dim=1) - 1.0).abs().max()) <= 1e-15
        assert torch.equal(samples.normals, samples.points)

    def test_scaled_circle_normals_are_unit(self):
        samples = sample(Sampler('circle', 100, seed=0, radius=0.15))
        assert torch.allclose(samples.normals.norm(dim=1), torch.ones(100), atol=1e-15)
        assert torch.allclose(samples.points.norm(dim=1), torch.full((100,), 0.15), atol=1e-15)

    def test_deterministic(self):
        sampler = Sampler('rectangle', 50, seed=3, lo=(0.0, 0.0), hi=(2.0, 1.0))
        assert torch.equal(sample(sampler).points, sample(sampler).points)

    def test_streams_differ(self):
        a = sample(Sampler('disk', 50, seed=3, stream=0)).points
        b = sample(Sampler('disk', 50, seed=3, stream=1)).points
        assert not torch.equal(a, b)

    def test_segment_keeps_fixed_coordinate(self):
        pts = sample(Sampler('segment', 100, seed=0, lo=(0.0, 1.0), hi=(1.0, 1.0))).points
        assert bool((pts[:, 1] == 1.0).all())
        assert bool(((pts[:, 0] >= 0.0) & (pts[:, 0] <= 1.0)).all())

    @pytest.mark.parametrize('kwargs', [{'region': 'sphere', 'count': 1},
                                        {'region': 'disk', 'count': 0},
                                        {'region': 'rectangle', 'count': 5},
                                        {'region': 'circle', 'count': 5, 'radius': 0.0}])
    def test_invalid_sampler(self, kwargs):
        with pytest.raises(ValueError):
            Sampler(**kwargs)


class TestEvalGrid:
    def test_unmasked_grid(self):
        grid = EvalGrid(lo=(0.0, 0.0), hi=(2.0, 1.0), n=5)
        first, second, inside = grid.mesh()
        assert first.shape == (5, 5)
        assert inside.all()
        assert np.array_equal(grid.points().numpy()[:5, 0], np.linspace(0.0, 2.0, 5))
