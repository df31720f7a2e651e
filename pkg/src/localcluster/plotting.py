"""Figure rendering for the bench suites.

Each helper takes the same row dicts the CSV writers receive and saves a
PNG next to the delimited output.  The Agg backend is forced so rendering
works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["sweep_figure", "delta_l_figure", "geometric_figure"]

_DPI = 150


def _save(fig, path):
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def sweep_figure(rows: list, path) -> None:
    """Jaccard and log10 runtime against cluster size, one curve per mode."""
    fig, (ax_j, ax_t) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    modes = sorted({r["mode"] for r in rows})
    for mode in modes:
        pts = sorted((r for r in rows if r["mode"] == mode), key=lambda r: r["n1"])
        xs = [r["n1"] for r in pts]
        ax_j.errorbar(xs, [r["jaccard_mean"] for r in pts],
                      yerr=[r["jaccard_std"] for r in pts],
                      marker="o", capsize=3, label=mode)
        ax_t.plot(xs, [r["log10_seconds"] for r in pts], marker="s", label=mode)
    ax_j.set_xlabel("cluster size n1")
    ax_j.set_ylabel("Jaccard index")
    ax_j.set_ylim(0.0, 1.05)
    ax_j.legend()
    ax_t.set_xlabel("cluster size n1")
    ax_t.set_ylabel("log10 seconds per trial")
    ax_t.legend()
    fig.suptitle("Seeded clustering on symmetric block models")
    _save(fig, path)


def delta_l_figure(rows: list, path) -> None:
    """Jaccard, Laplacian deviation norm, and SNR against graph size."""
    rows = sorted(rows, key=lambda r: r["n"])
    xs = [r["n"] for r in rows]
    fig, axes = plt.subplots(1, 3, figsize=(11.0, 3.2))
    axes[0].errorbar(xs, [r["jaccard_mean"] for r in rows],
                     yerr=[r["jaccard_std"] for r in rows], marker="o", capsize=3)
    axes[0].set_ylabel("Jaccard index")
    axes[1].errorbar(xs, [r["delta_l_mean"] for r in rows],
                     yerr=[r["delta_l_std"] for r in rows], marker="o", capsize=3, color="tab:red")
    axes[1].set_ylabel("deviation norm")
    axes[2].plot(xs, [r["snr"] for r in rows], marker="o", color="tab:green")
    axes[2].set_ylabel("SNR")
    for ax in axes:
        ax.set_xlabel("nodes n")
        ax.set_xscale("log", base=2)
    fig.suptitle("Laplacian deviation against block-model size")
    fig.tight_layout()
    _save(fig, path)


def geometric_figure(rows: list, path) -> None:
    """Mean accuracy per shape with one-standard-deviation whiskers."""
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    xs = range(len(rows))
    ax.bar(xs, [r["accuracy_mean"] for r in rows],
           yerr=[r["accuracy_std"] for r in rows], capsize=4, color="tab:blue", alpha=0.8)
    ax.set_xticks(list(xs))
    ax.set_xticklabels([r["shape"] for r in rows])
    ax.set_ylabel("accuracy (%)")
    ax.set_ylim(0, 105)
    fig.suptitle("Point-cloud clustering accuracy")
    _save(fig, path)
