"""PNG renderings of the benchmark tables (optional, needs matplotlib)."""

from __future__ import annotations

import warnings
from pathlib import Path

import numpy as np


def _pyplot():
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        warnings.warn("matplotlib is not installed; skipping the figure")
        return None
    return plt


def render(cfg, table, info, path: Path) -> Path | None:
    plt = _pyplot()
    if plt is None:
        return None
    cols = table.columns
    rows = table.rows
    fig, ax = plt.subplots(figsize=(6, 4.5))
    if cfg.command == "bench-orders":
        for label in dict.fromkeys(r[0] for r in rows):
            sel = [r for r in rows if r[0] == label]
            ax.loglog([r[2] for r in sel], [r[3] for r in sel], "o-", base=2,
                      label=f"{label} (slope {sel[0][-1]:.2f})")
        ax.set_xlabel("t")
        ax.set_ylabel("||exp(-tB) F(tB) - I||_F")
    elif cfg.command == "bench-q2":
        sel = [r for r in rows if r[0] == "banded"]
        ax.loglog([r[1] for r in sel], [r[3] for r in sel], "o-", label=f"banded, w={sel[0][2]}")
        full = [r for r in rows if r[0] == "full"][0]
        ax.loglog([full[1]], [full[3]], "s", label="full")
        ax.set_xlabel("n")
        ax.set_ylabel("operations")
    elif cfg.command == "bench-sparse":
        for kind in ("so", "sl"):
            sel = [r for r in rows if r[0] == kind]
            ax.loglog([r[1] for r in sel], [r[3] for r in sel], "o-", label=f"{kind} build")
            ax.loglog([r[1] for r in sel], [r[4] for r in sel], "x--", label=f"{kind} action")
        ax.set_xlabel("n")
        ax.set_ylabel("operations")
    elif cfg.command == "kdv":
        h = np.array([r[0] for r in rows])
        for c, name in enumerate(cols[1:4], start=1):
            ax.loglog(h, [r[c] for r in rows], "o-", base=2, label=name)
        ax.set_xlabel("h")
        ax.set_ylabel("error at t = 5")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    ax.set_title(cfg.echo(), fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
