import math

import numpy as np
import pandas as pd
import pytest
import torch

from autodiff import backward
from model.field import AnalyticField
from physics import TermKind
from problems import EvalGrid, ProblemDef, make_term
from problems.registry import get_problem
from problems.sampling import Sampler
from solver import Solver
from solver.metrics import Metrics, balance_frame, evaluate, predict_grid, score
from solver.optim import AdamState, adam_step
from solver.pinn import PINNSolver, train
from solver.utils import DivergenceError, RunRecord, TrainConfig


def tiny_config(**kwargs):
    options = {'seed': 0, 'iters': 3, 'width': 4, 'depth': 1, 'arch': 'lnn'}
    options.update(kwargs)
    return TrainConfig(**options)


def poisoned_problem():
    term = make_term('pde', TermKind.PDE, Sampler('rectangle', 4, 0, lo=(0.0, 0.0), hi=(1.0, 1.0)),
                     [], lambda u, points, normals: u.value * math.nan)
    return ProblemDef(name='poisoned', input_dim=2, axis_names=('x', 'y'), terms=[term], train_iters=1,
                      reference=None, eval_grid=EvalGrid(lo=(0.0, 0.0), hi=(1.0, 1.0)))


class TestTrainConfig:
    @pytest.mark.parametrize('kwargs', [{'iters': 0}, {'lr': 0.0}, {'batch_fraction': 0.0},
                                        {'batch_fraction': 1.5}, {'beta1': 1.0}, {'eps': 0.0}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            TrainConfig(**kwargs)

    def test_batch_mode(self):
        assert TrainConfig().batch_mode == 'full'
        assert TrainConfig(batch_fraction=0.25).batch_mode == 'fraction'

    def test_defaults(self):
        config = TrainConfig()
        assert (config.width, config.depth, config.lr, config.arch, config.gates) == (64, 4, 1e-3, 'lnn', 'channel')
        assert config.to_dict()['beta2'] == 0.999


class TestAdam:
    def test_first_step(self):
        params = torch.zeros(5)
        updated, state = adam_step(params, torch.ones(5), AdamState.zeros(5), TrainConfig())
        assert torch.allclose(updated, torch.full((5,), -1e-3 / (1.0 + 1e-8)), rtol=1e-12, atol=0.0)
        assert state.step == 1
        assert torch.allclose(state.m, torch.full((5,), 0.1))

    def test_zero_gradient_from_rest(self):
        params = torch.arange(4.0)
        updated, state = adam_step(params, torch.zeros(4), AdamState.zeros(4), TrainConfig())
        assert torch.equal(updated, params)
        assert torch.equal(state.m, torch.zeros(4))

    def test_moments_decay(self):
        state = AdamState(step=1, m=torch.ones(3), v=torch.ones(3))
        _, state = adam_step(torch.zeros(3), torch.zeros(3), state, TrainConfig())
        assert torch.allclose(state.m, torch.full((3,), 0.9))
        assert torch.allclose(state.v, torch.full((3,), 0.999))

    def test_nan_gradient_names_index(self):
        grad = torch.tensor([0.0, 1.0, math.nan, math.inf])
        with pytest.raises(DivergenceError, match='index 2'):
            adam_step(torch.zeros(4), grad, AdamState.zeros(4), TrainConfig())

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            adam_step(torch.zeros(4), torch.zeros(3), AdamState.zeros(4), TrainConfig())


class TestRunRecord:
    def test_frame_and_csv(self, tmp_path):
        record = RunRecord(terms=['pde', 'bc'])
        record.append(0, 3.0, {'pde': 1.0, 'bc': 2.0})
        record.append(1, 1.5, {'pde': 0.5, 'bc': 1.0})
        assert len(record) == 2
        assert record.totals.tolist() == [3.0, 1.5]
        record.save_history(tmp_path / 'loss.csv')
        frame = pd.read_csv(tmp_path / 'loss.csv')
        assert list(frame.columns) == ['step', 'total', 'pde', 'bc']
        assert frame['bc'].tolist() == [2.0, 1.0]


class TestSolver:
    def test_base_class_is_abstract(self, tiny_problem):
        solver = Solver(tiny_problem('laplace'), tiny_config())
        with pytest.raises(NotImplementedError):
            solver.fit()
        with pytest.raises(NotImplementedError):
            solver.train(0)

    @pytest.mark.parametrize('arch', ['mlp', 'lnn'])
    def test_single_iteration_is_one_adam_step(self, arch, tiny_problem):
        config = tiny_config(arch=arch, iters=1)
        solver = PINNSolver(tiny_problem('advection'), config)
        initial = solver.params.flat.clone()
        tape, total, _ = solver.loss(0)
        grad = backward(tape, total)
        expected, _ = adam_step(initial, grad.values.detach(), AdamState.zeros(initial.numel()), config)

        record = solver.fit()
        assert len(record) == 1
        assert record.history[0]['total'] == float(total)
        assert torch.equal(solver.params.flat, expected)

    @pytest.mark.parametrize('name', ['advection', 'heat'])
    def test_deterministic(self, name, tiny_problem):
        first = train(tiny_problem(name), tiny_config())
        second = train(tiny_problem(name), tiny_config())
        assert first.history == second.history
        assert torch.equal(first.params, second.params)
        assert first.status == second.status == 'completed'

    def test_history_rows(self, tiny_problem):
        record = train(tiny_problem('beam'), tiny_config(iters=2))
        frame = record.to_frame()
        assert frame['step'].tolist() == [0, 1]
        assert list(frame.columns[2:]) == ['pde', 'bottom_yy', 'top_yy', 'bottom', 'top', 'left', 'right']

    def test_loss_decreases(self, tiny_problem):
        problem = tiny_problem('advection')
        record = train(problem, tiny_config(width=16, depth=2, iters=200, lr=1e-2))
        assert record.totals[-1] < record.totals[0]

    def test_fraction_batches(self, tiny_problem):
        solver = PINNSolver(tiny_problem('laplace'), tiny_config(batch_fraction=0.25))
        first = solver.batch(0)
        assert [term.count for term in first] == [5] * 5
        assert all(torch.equal(a.points, b.points) for a, b in zip(first, solver.batch(0)))
        assert not all(torch.equal(a.points, b.points) for a, b in zip(first, solver.batch(1)))

    def test_full_batches_reuse_samples(self, tiny_problem):
        problem = tiny_problem('laplace')
        solver = PINNSolver(problem, tiny_config())
        assert solver.batch(7) is problem.terms

    def test_divergence_keeps_partial_record(self):
        solver = PINNSolver(poisoned_problem(), tiny_config())
        with pytest.raises(DivergenceError) as excinfo:
            solver.fit()
        assert excinfo.value.record.status == 'diverged'
        assert len(excinfo.value.record) == 0
        assert excinfo.value.record.params is not None

    def test_artifacts(self, tiny_problem, tmp_path):
        solver = PINNSolver(tiny_problem('laplace'), tiny_config(iters=2), output_dir=str(tmp_path))
        solver.fit()
        solver.save_history()
        solver.save_checkpoint()
        solver.save_params({'status': 'completed'})
        assert len(pd.read_csv(tmp_path / 'loss_history.csv')) == 2
        assert (tmp_path / 'params.bin').stat().st_size > 56
        assert (tmp_path / 'summary.json').read_text().startswith('{')


class TestMetrics:
    @pytest.mark.parametrize('name', ['advection', 'laplace', 'heat', 'beam'])
    def test_reference_scores_zero(self, name, tiny_problem):
        problem = tiny_problem(name)
        metrics = score(problem.reference, problem)
        assert metrics.rmse == 0.0
        assert metrics.mae == 0.0
        assert metrics.points == problem.eval_grid.points().shape[0]

    def test_known_offset(self, tiny_problem):
        problem = tiny_problem('laplace')
        shifted = AnalyticField(lambda x: x.select(1) + 0.5)
        metrics = score(shifted, problem)
        assert metrics.rmse == pytest.approx(0.5, rel=1e-14)
        assert metrics.mae == pytest.approx(0.5, rel=1e-14)

    def test_network_metrics_and_grid(self, tiny_problem):
        problem = tiny_problem('heat')
        solver = PINNSolver(problem, tiny_config(iters=1))
        solver.fit()
        metrics = evaluate(solver.params, problem)
        grid = predict_grid(solver.params, problem)
        inside = ~np.isnan(grid.predicted)
        assert metrics.rmse == pytest.approx(float(((grid.error[inside]) ** 2).mean() ** 0.5), rel=1e-12)
        assert inside.sum() == metrics.points

    def test_balance_per_scaling(self, tiny_problem):
        variants = {scaling: tiny_problem('heat', scaling=scaling) for scaling in ('appendix_A', 'unit')}
        params = PINNSolver(variants['unit'], tiny_config()).params
        frame = balance_frame(params, variants)
        assert frame['provenance'].tolist() == ['appendix_A', 'unit']
        assert not frame['degenerate'].any()

        scales = variants['appendix_A'].scales
        scaled, unit = frame.iloc[0], frame.iloc[1]
        assert unit['energy_pde'] == pytest.approx(scaled['energy_pde'] * scales.s_omega ** 2, rel=1e-10)
        assert unit['energy_bc'] == pytest.approx(scaled['energy_bc'] * scales.s_n ** 2, rel=1e-10)
        assert unit['kappa'] == max(unit['energy_pde'], unit['energy_bc']) / min(unit['energy_pde'], unit['energy_bc'])

    def test_save_and_load(self, tmp_path):
        Metrics(rmse=0.1, mae=0.05, points=3).save(tmp_path / 'metrics.txt')
        assert (tmp_path / 'metrics.txt').read_text() == 'rmse=0.10000000000000001\nmae=0.050000000000000003\n'
        loaded = Metrics.load(tmp_path / 'metrics.txt')
        assert (loaded.rmse, loaded.mae) == (0.1, 0.05)

    def test_missing_reference(self):
        with pytest.raises(ValueError):
            score(AnalyticField(lambda x: x.select(0)), poisoned_problem())


@pytest.mark.slow
class TestFullScale:
    @pytest.mark.parametrize('arch', ['mlp', 'lnn'])
    @pytest.mark.parametrize('name, threshold', [('advection', 1e-2), ('laplace', 5e-2), ('beam', 5e-2)])
    def test_some_seed_reaches_threshold(self, name, threshold, arch):
        best = math.inf
        for seed in range(10):
            problem = get_problem(name, seed=seed)
            solver = PINNSolver(problem, TrainConfig(seed=seed, iters=problem.train_iters, arch=arch))
            solver.fit()
            best = min(best, evaluate(solver.params, problem).rmse)
            if best < threshold:
                break
        assert best < threshold

    def test_advection_default_run_descends(self):
        problem = get_problem('advection', seed=0)
        record = train(problem, TrainConfig(seed=0, iters=problem.train_iters))
        assert record.totals[-1] < record.totals[0]
