from argparse import ArgumentParser
from concurrent.futures import ProcessPoolExecutor
import json
import logging
import math
import os
from pathlib import Path
import sys

import numpy as np
import pandas as pd

from fem import ConvergenceError, PointLocationError, assemble_and_solve, build_mesh_hierarchy, convergence_study
from model.params import load_params
from montecarlo import run_all
from plotting import plot_convergence, plot_field, plot_loss
from problems.heat import CONSTANTS as HEAT_CONSTANTS, SCALINGS, FemReference
from problems.registry import PROBLEMS, get_problem
from solver import DivergenceError, TrainConfig
from solver.metrics import balance_frame, evaluate, predict_grid
from solver.pinn import PINNSolver
from solver.utils import Config
from utils import (DummyPoolExecutor, MANIFEST_NAME, configure_logging, load_run_config, read_config_yaml,
                   set_determinism, write_manifest)

logger = logging.getLogger('cli')

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3
ARCHS = ('lnn', 'mlp')
DEFAULT_LEVELS = 5
EVALUATE_MANIFEST = 'manifest_evaluate.json'


def output_root(out: str = None) -> Path:
    return Path(out or os.environ.get('LNNPINN_OUT', 'out'))


def build_problem(cfg, **options):
    return get_problem(cfg.problem,
                       seed=cfg.train.seed,
                       counts=cfg.counts.to_dict(),
                       weights=cfg.weights.to_dict(),
                       constants=cfg.problem_constants.to_dict(),
                       **{**cfg.problem_options.to_dict(), **options})


def scale_variants(cfg, problem) -> dict:
    """The problem under every residual scaling it supports, keyed by provenance."""
    if problem.name != 'heat':
        return {problem.scales.provenance: problem}
    variants = (build_problem(cfg, scaling=scaling) for scaling in SCALINGS)
    return {variant.scales.provenance: variant for variant in variants}


def train_config(cfg, problem) -> TrainConfig:
    return TrainConfig(seed=cfg.train.seed,
                       iters=cfg.train.iters or problem.train_iters,
                       lr=cfg.train.lr,
                       beta1=cfg.train.beta1,
                       beta2=cfg.train.beta2,
                       eps=cfg.train.eps,
                       batch_fraction=cfg.train.batch_fraction,
                       arch=cfg.model.arch,
                       width=cfg.model.width,
                       depth=cfg.model.depth,
                       gates=cfg.model.gates)


def run_training(config_dict: dict, out_root: str, quiet: bool = True) -> dict:
    """Train one network and write its artifacts; returns the run summary (status, rmse, mae)."""
    cfg = Config(config_dict)
    set_determinism(cfg.train.seed)
    run_dir = Path(out_root, f'{cfg.problem}-{cfg.model.arch}-{cfg.train.seed}')
    write_manifest(run_dir, {'command': 'train', 'problem': cfg.problem, 'seed': cfg.train.seed,
                             'output_dir': str(run_dir), 'config': config_dict})

    problem = build_problem(cfg)
    solver = PINNSolver(problem, train_config(cfg, problem), output_dir=str(run_dir), quiet=quiet)
    balance = balance_frame(solver.params, scale_variants(cfg, problem))
    balance.to_csv(run_dir / 'balance.csv', index=False, float_format='%.17g')
    for row in balance.itertuples():
        logger.info(f'{problem.name}: initial loss balance with {row.provenance} scales, kappa={row.kappa:.3e}')
    summary = {'problem': problem.name, 'arch': cfg.model.arch, 'seed': cfg.train.seed, 'run_dir': str(run_dir)}
    try:
        record = solver.fit()
    except DivergenceError as exc:
        solver.save_history()
        solver.save_checkpoint()
        summary.update(status='diverged', message=str(exc), rmse=math.nan, mae=math.nan)
        solver.save_params(summary)
        return summary

    solver.save_history()
    solver.save_checkpoint()
    metrics = evaluate(solver.params, problem)
    metrics.save(run_dir / 'metrics.txt')

    frame = record.to_frame()
    plot_loss(frame, run_dir / 'loss.svg', title=f'{problem.name} ({cfg.model.arch})')
    if problem.input_dim == 2:
        grid = predict_grid(solver.params, problem)
        plot_field(grid.first, grid.second, grid.predicted, run_dir / 'field.svg',
                   title=f'{problem.name}: prediction', labels=problem.axis_names)
        plot_field(grid.first, grid.second, grid.error, run_dir / 'error.svg',
                   title=f'{problem.name}: absolute error', labels=problem.axis_names, cmap='magma')

    summary.update(status=record.status, rmse=metrics.rmse, mae=metrics.mae,
                   final_loss=record.history[-1]['total'], wall_time=record.wall_time)
    solver.save_params(summary)
    logger.info(f'{run_dir}: rmse={metrics.rmse:.6e}, mae={metrics.mae:.6e}')
    return summary


def _run_config(args, arch: str = None, seed: int = None) -> dict:
    overrides = {'problem': args.problem,
                 'model': {'arch': arch or args.arch, 'width': args.width, 'depth': args.depth},
                 'train': {'seed': args.seed if seed is None else seed, 'iters': args.iters, 'lr': args.lr,
                           'batch_fraction': args.batch_fraction}}
    return load_run_config(args.config, overrides).to_dict()


def cmd_train(args) -> int:
    summary = run_training(_run_config(args), output_root(args.out), quiet=args.quiet)
    return EXIT_OK if summary['status'] == 'completed' else EXIT_NUMERICAL


def cmd_compare(args) -> int:
    if args.seeds < 1:
        raise ValueError(f'--seeds must be at least 1, got {args.seeds}')
    out_root = output_root(args.out)
    compare_dir = out_root / f'{args.problem}-compare'
    first = 0 if args.seed is None else args.seed
    seeds = list(range(first, first + args.seeds))
    configs = {(seed, arch): _run_config(args, arch, seed) for seed in seeds for arch in ARCHS}
    write_manifest(compare_dir, {'command': 'compare', 'problem': args.problem, 'seed': seeds,
                                 'output_dir': str(compare_dir), 'config': configs[(seeds[0], 'lnn')]})

    pool = ProcessPoolExecutor(args.workers) if args.workers > 0 else DummyPoolExecutor()
    with pool:
        jobs = {key: pool.submit(run_training, config, str(out_root), True) for key, config in configs.items()}
        results = {key: job.result() for key, job in jobs.items()}

    rows = [{'seed': seed,
             'lnn_rmse': results[(seed, 'lnn')]['rmse'], 'lnn_mae': results[(seed, 'lnn')]['mae'],
             'mlp_rmse': results[(seed, 'mlp')]['rmse'], 'mlp_mae': results[(seed, 'mlp')]['mae']}
            for seed in seeds]
    frame = pd.DataFrame(rows, columns=['seed', 'lnn_rmse', 'lnn_mae', 'mlp_rmse', 'mlp_mae'])
    published = PROBLEMS[args.problem]().published_metrics
    reference = pd.DataFrame([{'seed': 'published',
                               'lnn_rmse': published['lnn'][0], 'lnn_mae': published['lnn'][1],
                               'mlp_rmse': published['mlp'][0], 'mlp_mae': published['mlp'][1]}])
    pd.concat([frame, reference], ignore_index=True).to_csv(compare_dir / 'comparison.csv',
                                                           index=False, float_format='%.17g')

    wins = int(np.sum(frame['lnn_rmse'].to_numpy() < frame['mlp_rmse'].to_numpy()))
    print(f'{args.problem}: LNN beats MLP on RMSE in {wins}/{len(seeds)} seeds')
    diverged = [key for key, result in results.items() if result['status'] != 'completed']
    if diverged:
        logger.error(f'diverged runs (seed, arch): {diverged}')
        return EXIT_NUMERICAL
    return EXIT_OK


def _fem_settings(args) -> dict:
    settings = {'levels': DEFAULT_LEVELS, **{k: HEAT_CONSTANTS[k] for k in ('k', 'h', 'T_inf', 'Q', 'R')}}
    if args.config is not None:
        settings.update(read_config_yaml(args.config).to_dict().get('fem', {}))
    if getattr(args, 'levels', None) is not None:
        settings['levels'] = args.levels
    return settings


def cmd_evaluate(args) -> int:
    run_dir = Path(args.run_dir)
    with open(run_dir / MANIFEST_NAME) as stream:
        manifest = json.load(stream)
    cfg = Config(manifest['config'])
    problem = build_problem(cfg)
    params = load_params(run_dir / 'params.bin')
    if args.fem and problem.name != 'heat':
        raise ValueError(f'--fem only applies to the heat problem, not {problem.name}')
    settings = _fem_settings(args) if args.fem else None
    write_manifest(run_dir, {'command': 'evaluate', 'problem': cfg.problem, 'seed': cfg.train.seed,
                             'output_dir': str(run_dir), 'config': manifest['config'], 'fem': settings},
                   name=EVALUATE_MANIFEST)

    metrics = evaluate(params, problem)
    print(f'{problem.name} vs closed form:\n{metrics}', end='')
    metrics.save(run_dir / 'metrics_eval.txt')

    if args.fem:
        constants = problem.constants
        mesh = build_mesh_hierarchy(constants['R'], settings['levels'])[-1]
        solution = assemble_and_solve(mesh, constants['k'], constants['Q'], constants['h'], constants['T_inf'])
        fem_metrics = evaluate(params, problem, reference=FemReference(solution, constants))
        print(f'{problem.name} vs finite elements (level {mesh.level}):\n{fem_metrics}', end='')
        fem_metrics.save(run_dir / 'metrics_fem.txt')
    return EXIT_OK


def cmd_fem_converge(args) -> int:
    settings = _fem_settings(args)
    out_dir = output_root(args.out) / 'fem-converge'
    write_manifest(out_dir, {'command': 'fem-converge', 'problem': 'heat', 'seed': None,
                             'output_dir': str(out_dir), 'config': settings})

    hierarchy = build_mesh_hierarchy(settings['R'], settings['levels'])
    report = convergence_study(hierarchy, settings['k'], settings['Q'], settings['h'], settings['T_inf'])

    frame = report.to_frame()
    frame.to_csv(out_dir / 'convergence.csv', index=False, float_format='%.17g')
    report.orders_frame().to_csv(out_dir / 'orders.csv', index=False, float_format='%.17g')
    plot_convergence(frame, report.l2_slope, report.h1_slope, out_dir / 'convergence.svg')
    if args.export:
        finest = report.solutions[-1]
        finest.mesh.save(str(out_dir / f'level{finest.mesh.level}'), finest.temperature)

    print(f'global L2 slope {report.l2_slope:.3f} (published 1.989)')
    print(f'global H1 slope {report.h1_slope:.3f} (published 1.008)')
    return EXIT_OK


def cmd_mc_verify(args) -> int:
    out_dir = output_root(args.out) / 'mc-verify'
    write_manifest(out_dir, {'command': 'mc-verify', 'problem': None, 'seed': None,
                             'output_dir': str(out_dir), 'config': {}})
    results = run_all()
    width = max(len(result.name) for result in results)
    for result in results:
        print(f'{result.name:<{width}}  {"PASS" if result.passed else "FAIL"}  {result.detail}')
        if result.table is not None:
            result.table.to_csv(out_dir / f'{result.name}.csv', index=False, float_format='%.17g')
    return EXIT_OK if all(result.passed for result in results) else 1


def _add_run_args(parser):
    parser.add_argument('problem', type=str, choices=sorted(PROBLEMS))
    parser.add_argument('-a', '--arch', type=str, choices=ARCHS, default=None)
    parser.add_argument('-s', '--seed', type=int, default=None)
    parser.add_argument('-i', '--iters', type=int, default=None)
    parser.add_argument('-w', '--width', type=int, default=None)
    parser.add_argument('-d', '--depth', type=int, default=None)
    parser.add_argument('--lr', type=float, default=None)
    parser.add_argument('-f', '--batch-fraction', dest='batch_fraction', type=float, default=None)


def _add_common_args(parser):
    parser.add_argument('-o', '--out', type=str, default=None)
    parser.add_argument('-c', '--config', type=str, default=None)
    parser.add_argument('--quiet', dest='quiet', action='store_true', default=False)
    parser.add_argument('--verbose', dest='verbose', action='store_true', default=False)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser('lnn-pinn', description='Liquid-gated PINNs, FEM reference and estimator checks.')
    commands = parser.add_subparsers(dest='command', required=True)

    train = commands.add_parser('train', help='train one network on a benchmark')
    _add_run_args(train)
    _add_common_args(train)
    train.set_defaults(func=cmd_train)

    compare = commands.add_parser('compare', help='train both architectures over several seeds')
    _add_run_args(compare)
    _add_common_args(compare)
    compare.add_argument('-n', '--seeds', type=int, default=10)
    compare.add_argument('-j', '--workers', type=int, default=0)
    compare.set_defaults(func=cmd_compare)

    evaluate_cmd = commands.add_parser('evaluate', help='rescore a finished run')
    evaluate_cmd.add_argument('run_dir', type=str)
    evaluate_cmd.add_argument('--fem', action='store_true', default=False)
    evaluate_cmd.add_argument('-l', '--levels', type=int, default=None)
    _add_common_args(evaluate_cmd)
    evaluate_cmd.set_defaults(func=cmd_evaluate)

    fem = commands.add_parser('fem-converge', help='finite-element convergence study for the disk')
    fem.add_argument('-l', '--levels', type=int, default=None)
    fem.add_argument('--export', action='store_true', default=False)
    _add_common_args(fem)
    fem.set_defaults(func=cmd_fem_converge)

    mc = commands.add_parser('mc-verify', help='estimator unbiasedness, variance and SLLN checks')
    _add_common_args(mc)
    mc.set_defaults(func=cmd_mc_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        return args.func(args)
    except (DivergenceError, ConvergenceError, PointLocationError) as exc:
        logger.error(f'numerical failure: {exc}')
        return EXIT_NUMERICAL
    except (ValueError, FileNotFoundError) as exc:
        logger.error(str(exc))
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
