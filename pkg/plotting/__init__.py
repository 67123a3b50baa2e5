"""SVG figures for training runs and the FEM convergence study.

Figures are rendered with the Agg backend and written without date metadata
under a fixed hash salt, so reruns produce identical files.
"""
import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams['svg.hashsalt'] = 'lnn-pinn'
plt.rcParams['svg.fonttype'] = 'path'

SVG_METADATA = {'Date': None, 'Creator': None}


def _save(fig, path):
    fig.savefig(path, format='svg', metadata=SVG_METADATA)
    plt.close(fig)


def plot_loss(frame, path, title: str = ''):
    """Total and per-term loss histories on a log scale."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(frame['step'], frame['total'], color='k', lw=1.5, label='total')
    for column in frame.columns[2:]:
        ax.semilogy(frame['step'], frame[column], lw=0.8, label=column)
    ax.set_xlabel('step')
    ax.set_ylabel('loss')
    ax.set_title(title)
    ax.legend(fontsize='small')
    fig.tight_layout()
    _save(fig, path)


def plot_field(first: np.ndarray, second: np.ndarray, values: np.ndarray, path,
               title: str = '', labels=('x', 'y'), cmap: str = 'viridis'):
    """Heatmap of a field on the evaluation grid; NaN cells (outside the domain) stay blank."""
    fig, ax = plt.subplots(figsize=(5, 4))
    mesh = ax.pcolormesh(first, second, np.ma.masked_invalid(values), shading='auto', cmap=cmap)
    fig.colorbar(mesh, ax=ax)
    ax.set_xlabel(labels[0])
    ax.set_ylabel(labels[1])
    ax.set_title(title)
    ax.set_aspect('equal' if labels == ('x', 'y') else 'auto')
    fig.tight_layout()
    _save(fig, path)


def plot_convergence(frame, l2_slope: float, h1_slope: float, path):
    """Log-log inter-level errors against the fine mesh size with the fitted slopes."""
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(frame['h_fine'], frame['l2'], 'o-', color='tab:blue', label=f'$L^2$ (slope {l2_slope:.3f})')
    ax.loglog(frame['h_fine'], frame['h1'], 's-', color='tab:red', label=f'$H^1$ (slope {h1_slope:.3f})')
    ax.set_xlabel('$h_f$')
    ax.set_ylabel('inter-level error')
    ax.legend()
    ax.grid(True, which='both', lw=0.3)
    fig.tight_layout()
    _save(fig, path)
