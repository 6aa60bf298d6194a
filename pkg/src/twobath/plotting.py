"""Optional static SVG rendering (needs matplotlib)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import InvalidParameter


def _pyplot():
    try:
        import matplotlib
    except ImportError:
        raise InvalidParameter("SVG output needs matplotlib: pip install 'artifact[plot]'") from None
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def line_svg(x, y, xlabel: str, ylabel: str, path: Path):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(x, y)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def heatmap_svg(result, path: Path):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    a1, a2 = result.axis1_values, result.axis2_values
    values = np.where(result.status == "ok", result.values, np.nan).astype(float)
    mesh = ax.pcolormesh(a2, a1, values, shading="nearest")
    ax.set_xlabel(result.spec.axis2.name)
    ax.set_ylabel(result.spec.axis1.name)
    fig.colorbar(mesh, ax=ax, label=result.spec.observable)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
