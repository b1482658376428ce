"""Figure rendering for the CLI report paths.

Each saver takes the same rows the CSV writers receive and renders a PNG next
to the delimited output. matplotlib is imported lazily with the Agg backend
so headless runs and non-plotting commands stay light.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_solve_figure(path: str | Path, reports: list[Any], title: str = "") -> None:
    plt = _plt()
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    copies = [r.copies_consumed for r in reports]
    ax1.hist(copies, bins=min(30, max(5, len(set(copies)))), color="tab:blue", alpha=0.8)
    ax1.set_xlabel("state copies consumed")
    ax1.set_ylabel("trials")
    successes = sum(1 for r in reports if r.success)
    ax1.set_title(f"copies per trial ({successes}/{len(reports)} recovered)")
    for r in reports[: min(len(reports), 40)]:
        ax2.plot(range(1, len(r.rank_trace) + 1), r.rank_trace, alpha=0.25, color="tab:gray")
    ax2.set_xlabel("draw")
    ax2.set_ylabel("GF(2) rank")
    ax2.set_title("rank traces")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_bench_figure(path: str | Path, rows: list[dict[str, Any]], title: str = "") -> None:
    """rows: per (n, mode) aggregates with mean/std copies."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    modes = sorted({r["mode"] for r in rows})
    for mode in modes:
        sub = sorted((r for r in rows if r["mode"] == mode), key=lambda r: r["n"])
        ns = [r["n"] for r in sub]
        means = [r["mean_copies"] for r in sub]
        errs = [r["std_copies"] for r in sub]
        ax.errorbar(ns, means, yerr=errs, marker="o", capsize=3, label=mode)
    ax.set_xlabel("qubits n")
    ax.set_ylabel("mean copies consumed")
    ax.set_yscale("log")
    ax.legend()
    ax.grid(True, alpha=0.3)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_validate_figure(path: str | Path, moment_report: Any,
                         covariance_rows: list[dict[str, Any]] | None = None,
                         title: str = "") -> None:
    plt = _plt()
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    pw = moment_report.per_weight_purity
    ws = [r["weight"] for r in pw if r["z"] is not None]
    zs = [r["z"] for r in pw if r["z"] is not None]
    ax1.scatter(ws, zs, color="tab:blue", label="purity mean")
    pf = moment_report.per_weight_fourier
    ax1.scatter(
        [r["weight"] for r in pf if r["z"] is not None],
        [r["z"] for r in pf if r["z"] is not None],
        color="tab:orange", marker="s", label="transform mean",
    )
    for level in (-4, 4):
        ax1.axhline(level, color="red", linestyle="--", linewidth=0.8)
    ax1.set_xlabel("Hamming weight")
    ax1.set_ylabel("z-score")
    ax1.legend(fontsize=8)
    ax1.set_title(f"moment z-scores (n={moment_report.n})")
    if covariance_rows:
        zc = [r["z"] for r in covariance_rows if r["z"] is not None]
        ax2.bar(range(len(zc)), zc, color="tab:green", alpha=0.8)
        for level in (-4, 4):
            ax2.axhline(level, color="red", linestyle="--", linewidth=0.8)
        ax2.set_xlabel("mask pair")
        ax2.set_ylabel("z-score")
        ax2.set_title("purity covariance")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_xcheck_figure(path: str | Path, cases: list[dict[str, Any]],
                       threshold: float, title: str = "") -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(8, 3.6))
    tvs = [max(c["tv"], 1e-18) for c in cases]
    ax.bar(range(len(cases)), tvs, color="tab:blue", alpha=0.8)
    ax.axhline(threshold, color="red", linestyle="--", label=f"threshold {threshold:g}")
    ax.set_yscale("log")
    ax.set_xlabel("case")
    ax.set_ylabel("total variation")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
