"""Matplotlib figures written next to the CSV/JSON/SVG outputs."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .diagnostics import DiagnosticsRecord  # noqa: E402
from .geometry import curve_of  # noqa: E402
from .grid import Field  # noqa: E402

_STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "lines.linewidth": 1.2,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    "svg.hashsalt": "curveflow",
}

# (column, label, log scale)
_PANELS = (
    ("energy", "bending energy", False),
    ("l2_norm", r"$\|S\|_{L^2}$", False),
    ("convexity_margin", r"$\min(S_{\theta\theta}+S)$", False),
    ("steady_residual", "steady residual", True),
)


def plot_series(records: Sequence[DiagnosticsRecord], path, title: str = "") -> Path:
    path = Path(path)
    t = np.array([r.t for r in records])
    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(2, 2, figsize=(7.0, 4.6), sharex=True)
        for ax, (col, label, logy) in zip(axes.flat, _PANELS):
            y = np.array([getattr(r, col) for r in records], dtype=float)
            if logy:
                y = np.where(y > 0, y, np.nan)
                ax.set_yscale("log")
            ax.plot(t, y, marker="o" if len(t) < 30 else None, ms=3)
            ax.set_ylabel(label)
        for ax in axes[-1]:
            ax.set_xlabel("t")
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        fig.savefig(path, metadata={"Software": None})
        plt.close(fig)
    return path


def plot_curves(states: Sequence[Field], times: Sequence[float], path, title: str = "") -> Path:
    """Overlay of the reconstructed curves, light to dark in time."""
    path = Path(path)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(4.6, 4.6))
        cmap = plt.get_cmap("viridis")
        count = len(states)
        for i, (S, t) in enumerate(zip(states, times)):
            c = curve_of(S)
            x = np.append(c.x, c.x[0])
            y = np.append(c.y, c.y[0])
            label = f"t = {t:.3g}" if i in (0, count - 1) else None
            ax.plot(x, y, color=cmap(i / max(count - 1, 1)), label=label)
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        if title:
            ax.set_title(title)
        ax.legend(loc="upper right", frameon=False)
        fig.tight_layout()
        fig.savefig(path, metadata={"Software": None})
        plt.close(fig)
    return path
