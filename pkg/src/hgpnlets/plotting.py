"""Figures for CLI reports, rendered with the non-interactive Agg backend."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.figsize": (5.0, 3.6),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 9,
    "legend.fontsize": 8,
}


def _save(fig, out_dir: Path, name: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{name}.png"
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def _parse_cells(cells: dict) -> np.ndarray:
    pts = [(int(a), int(b), int(c)) for key, c in cells.items() for a, b in [key.split(",")]]
    return np.array(pts, dtype=np.int64).reshape(-1, 3)


def plot_localized_table(report: dict, out_dir, name: str = "localized") -> Path:
    """Heat map of (max V-line weight, max E-line weight) counts."""
    pts = _parse_cells(report["cells"])
    grid = np.zeros((pts[:, 0].max() + 1, pts[:, 1].max() + 1))
    grid[pts[:, 0], pts[:, 1]] = pts[:, 2]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        im = ax.imshow(np.log10(np.where(grid > 0, grid, np.nan)), origin="lower", cmap="viridis", aspect="auto")
        ax.axhline(report["threshold_v"] - 0.5, color="tab:red", lw=1, ls="--", label="V threshold")
        ax.axvline(0.5, color="tab:orange", lw=1, ls="--", label="E threshold")
        ax.set_xlabel("max E-line weight")
        ax.set_ylabel("max V-line weight")
        ax.set_title(f"kind {report['kind']}, {report['mode']} coset, {report['size']} words")
        ax.grid(False)
        ax.legend(loc="upper right")
        fig.colorbar(im, ax=ax, label="log10 count")
        return _save(fig, Path(out_dir), name)


def plot_audit(report: dict, out_dir) -> list[Path]:
    paths = []
    for kind in ("Z", "X"):
        table = report.get(f"localized_{kind}")
        if table and "cells" in table:
            paths.append(plot_localized_table(table, out_dir, f"localized_{kind}"))
    return paths


def plot_warmup(report: dict, out_dir) -> list[Path]:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        x = np.arange(2)
        for off, basis in ((-0.2, "Z"), (0.2, "X")):
            m = report["masses"][basis]
            ax.bar(x + off, [m["C0"], m["C1"]], width=0.4, label=f"{basis} basis")
        ax.axhline(report["mu"], color="k", lw=1, ls="--", label="mu")
        ax.set_xticks(x, ["cell 0", "cell 1"])
        ax.set_ylabel("mass")
        ax.set_ylim(0, 1)
        ax.legend()
        return [_save(fig, Path(out_dir), "warmup_masses")]


def plot_nlets(report: dict, out_dir) -> list[Path]:
    runs = report["runs"]
    out_dir = Path(out_dir)
    paths = []
    mu = np.array([r.get("mu", np.nan) for r in runs])
    c0 = runs[0]["c0"] if runs else 0.0
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.hist(mu[np.isfinite(mu)], bins=20, color="tab:blue")
        ax.axvline(c0, color="tab:red", ls="--", lw=1, label="c0")
        ax.set_xlabel("smaller cell mass")
        ax.set_ylabel("runs")
        ax.legend()
        paths.append(_save(fig, out_dir, "nlets_masses"))

        fig, ax = plt.subplots()
        vf = [r["residual"]["vertex_fraction"] for r in runs]
        ef = [r["residual"]["edge_fraction"] for r in runs]
        vb = [r["residual"]["vertex_bound"] for r in runs]
        ax.scatter(vb, vf, s=10, label="vertex fraction")
        ax.scatter(vb, ef, s=10, marker="x", label="edge fraction")
        lo = min(vb + [0.0])
        ax.plot([lo, 1], [lo, 1], color="k", lw=0.8)
        ax.set_xlabel("vertex bound 1 - eps'")
        ax.set_ylabel("residual fraction")
        ax.legend()
        paths.append(_save(fig, out_dir, "nlets_residual"))

        fig, ax = plt.subplots()
        D = [r["D"] for r in runs if r.get("D") is not None]
        if D:
            vals, counts = np.unique(D, return_counts=True)
            ax.bar(vals, counts, color="tab:green")
        ax.set_xlabel("distance lower bound D")
        ax.set_ylabel("runs")
        paths.append(_save(fig, out_dir, "nlets_distance"))
    return paths


def plot_expansion(report: dict, out_dir) -> list[Path]:
    """Measured minimum expansion ratio against the lower bound, per gamma."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for i, g in enumerate(report["gammas"]):
            pts = [
                (ch["bound"], ch["min_ratio"])
                for r in report["reports"]
                for ch in r["checks"]
                if ch["gamma"] == g and isinstance(ch["min_ratio"], (int, float)) and not ch["degenerate"]
            ]
            if pts:
                b, m = np.array(pts).T
                ax.scatter(b, m, s=10, color=f"C{i}", label=f"gamma={g}")
        ax.set_xscale("log")
        ax.set_yscale("log")
        lims = ax.get_xlim()
        ax.plot(lims, lims, color="k", lw=0.8)
        ax.set_xlabel("lower bound")
        ax.set_ylabel("measured min ratio")
        if ax.get_legend_handles_labels()[0]:
            ax.legend()
        return [_save(fig, Path(out_dir), "expansion_ratios")]


PLOTTERS = {
    "audit": plot_audit,
    "warmup": plot_warmup,
    "nlets": plot_nlets,
    "expansion-trials": plot_expansion,
}


def render(command: str, report: dict, out_dir) -> list[Path]:
    plotter = PLOTTERS.get(command)
    return plotter(report, out_dir) if plotter else []
