"""Figure rendering for the CLI report paths.

Each helper takes already-computed rows and writes one PNG next to the
delimited output.  Figures are rendered with the Agg backend so the CLI
works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE_KWARGS = {"dpi": 150, "bbox_inches": "tight"}


def save_amplitude_figure(path: str, amplitudes: np.ndarray, title: str) -> None:
    """Stem-style plot of |amplitude| over the computational basis index."""
    fig, ax = plt.subplots(figsize=(7, 3))
    mags = np.abs(amplitudes)
    ax.vlines(np.arange(len(mags)), 0.0, mags, color="tab:blue", lw=1.0)
    ax.set_xlabel("basis index (little-endian bits)")
    ax.set_ylabel("|amplitude|")
    ax.set_title(title)
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def save_spectrum_figure(path: str, rows: list[dict], title: str) -> None:
    """lambda_+/- against the cut position, one line pair per source."""
    fig, ax = plt.subplots(figsize=(6, 4))
    sources = sorted({r["source"] for r in rows})
    markers = {"closed_form": "o", "covariance": "s", "dense": "x"}
    for src in sources:
        pts = sorted((r["ell"], r["lambda_plus"], r["lambda_minus"]) for r in rows if r["source"] == src)
        ells = [p[0] for p in pts]
        ax.plot(ells, [p[1] for p in pts], marker=markers.get(src, "."), label=f"{src} +")
        ax.plot(ells, [p[2] for p in pts], marker=markers.get(src, "."), ls="--", label=f"{src} -")
    ax.set_xlabel("cut position")
    ax.set_ylabel("spectrum weight")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def save_sweep_figure(path: str, rows: list[dict], title: str) -> None:
    """Correlation length vs angle and spectrum gap vs size, side by side."""
    ok = [r for r in rows if not r.get("error")]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    by_n: dict[int, list] = {}
    for r in ok:
        by_n.setdefault(r["n"], []).append(r)
    for n, group in sorted(by_n.items()):
        pts = sorted((r["theta"], r["xi"]) for r in group if np.isfinite(r["xi"]))
        if pts:
            ax1.plot([p[0] for p in pts], [p[1] for p in pts], marker=".", label=f"n={n}")
    ax1.set_xlabel("theta")
    ax1.set_ylabel("correlation length")
    ax1.legend(fontsize=8)
    by_theta: dict[float, list] = {}
    for r in ok:
        if r.get("gap") is not None and r["gap"] > 0:
            by_theta.setdefault(round(r["theta"], 12), []).append(r)
    for theta, group in sorted(by_theta.items()):
        pts = sorted((r["n"], r["gap"]) for r in group)
        ax2.semilogy([p[0] for p in pts], [p[1] for p in pts], marker=".", label=f"theta={theta:.3f}")
    ax2.set_xlabel("n")
    ax2.set_ylabel("spectrum gap")
    if by_theta:
        ax2.legend(fontsize=7)
    fig.suptitle(title)
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def save_residual_figure(path: str, checks: list[dict], title: str) -> None:
    """Log-scale bar chart of per-check residuals with their tolerances."""
    fig, ax = plt.subplots(figsize=(max(6, 0.35 * len(checks)), 4))
    names = [c["name"] for c in checks]
    residuals = [max(c["residual"], 1e-18) for c in checks]
    colors = ["tab:green" if c["pass"] else "tab:red" for c in checks]
    ax.bar(range(len(names)), residuals, color=colors)
    ax.set_yscale("log")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=90, fontsize=6)
    ax.set_ylabel("residual")
    ax.set_title(title)
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
