"""Figure rendering for run, comparison, counting, and noise-sweep reports.

Every report path renders its matplotlib figures next to the delimited
output, so a run directory is self-contained.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

CHEMICAL_ACCURACY = 1.594e-3
_METHOD_COLORS = {"uniform": "tab:blue", "vmsa": "tab:orange", "vpsr": "tab:green"}


def _read_aggregate(path: Path) -> dict[str, list[float]]:
    cols: dict[str, list[float]] = {}
    with open(path) as fh:
        for row in csv.DictReader(fh):
            for key, value in row.items():
                cols.setdefault(key, []).append(float(value))
    return cols


def render_run(outdir: Path, agg, ham, config) -> Path:
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    title = f"{ham.molecule} · {config.pool_kind} · {config.allocation} · {config.mode}"

    floor = 1e-9
    errors = [max(e, floor) for e in agg.err_of_mean]
    axes[0].semilogy(agg.iterations, errors, "o-", label="|mean E − FCI|")
    axes[0].semilogy(agg.iterations, [max(e, floor) for e in agg.mean_abs_err],
                     "s--", alpha=0.6, label="mean |E − FCI|")
    axes[0].axhline(CHEMICAL_ACCURACY, color="gray", ls=":", label="chemical accuracy")
    axes[0].set_xlabel("adaptive iteration")
    axes[0].set_ylabel("energy error (Ha)")
    axes[0].legend(fontsize=8)

    axes[1].semilogy(agg.mean_cumulative, errors, "o-")
    axes[1].axhline(CHEMICAL_ACCURACY, color="gray", ls=":")
    axes[1].set_xlabel("cumulative shots (mean)")
    axes[1].set_ylabel("energy error (Ha)")

    fig.suptitle(title)
    fig.tight_layout()
    path = Path(outdir) / "convergence.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_comparison(root: Path, summaries: dict) -> Path:
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    floor = 1e-9
    for method, summary in summaries.items():
        agg_path = Path(root) / method / "aggregate.csv"
        if not agg_path.exists():
            continue
        cols = _read_aggregate(agg_path)
        err = [max(e, floor) for e in cols["err_of_mean"]]
        axes[0].semilogy(cols["mean_cumulative_shots"], err, "o-",
                         color=_METHOD_COLORS.get(method), label=method)
    axes[0].axhline(CHEMICAL_ACCURACY, color="gray", ls=":")
    axes[0].set_xlabel("cumulative shots (mean)")
    axes[0].set_ylabel("energy error (Ha)")
    axes[0].legend()

    methods, bottoms = [], []
    for method, summary in summaries.items():
        split = summary.get("split_at_crossing")
        if not split:
            continue
        methods.append(method)
        bottoms.append((split["vqe"], split["gradient"], split["saved"]))
    if methods:
        vqe = [b[0] for b in bottoms]
        grad = [b[1] for b in bottoms]
        saved = [b[2] for b in bottoms]
        colors = [_METHOD_COLORS.get(m, "tab:gray") for m in methods]
        axes[1].bar(methods, vqe, color=colors, hatch="//", label="VQE")
        axes[1].bar(methods, grad, bottom=vqe, color=colors, alpha=0.55, label="gradient")
        axes[1].bar(methods, saved, bottom=[v + g for v, g in zip(vqe, grad)],
                    color="lightgray", label="saved by reuse")
        axes[1].set_ylabel("shots to chemical accuracy")
        axes[1].legend(fontsize=8)

    fig.tight_layout()
    path = Path(root) / "comparison.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_noise_sweep(root: Path, results: dict) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    floor = 1e-9
    for key, entry in results.items():
        outdir = Path(entry["summary"]["config"]["output_dir"])
        agg_path = outdir / "aggregate.csv"
        if not agg_path.exists():
            continue
        cols = _read_aggregate(agg_path)
        err = [max(e, floor) for e in cols["err_of_mean"]]
        ax.semilogy(cols["iteration"], err, "o-", label=f"p={key}")
    ax.axhline(CHEMICAL_ACCURACY, color="gray", ls=":", label="chemical accuracy")
    ax.set_xlabel("adaptive iteration")
    ax.set_ylabel("energy error (Ha)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(root) / "noise_sweep.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_counts(outdir: Path, reports: list) -> Path:
    fig, ax = plt.subplots(figsize=(1.8 + 1.3 * len(reports), 4))
    labels = [f"{r.molecule}\n{r.pool_kind}" for r in reports]
    x = range(len(reports))
    grouped = [100.0 * r.grouped_fraction for r in reports]
    reused = [100.0 * r.reused_fraction for r in reports]
    width = 0.38
    ax.bar([i - width / 2 for i in x], grouped, width, label="grouping only")
    ax.bar([i + width / 2 for i in x], reused, width, label="grouping + reuse")
    ax.axhline(100.0, color="gray", ls=":")
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylabel("shot usage vs naive (%)")
    ax.legend()
    fig.tight_layout()
    path = Path(outdir) / "counts.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
