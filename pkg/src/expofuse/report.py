"""Delimited outputs and matplotlib figures for the CLI report paths.

CSV cells use repr() of Python floats so outputs are bit-reproducible across
runs; figures are rendered headlessly to PNG next to the CSVs.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .cube import HsiCube
from .io import default_false_color_bands
from .metrics import MetricReport


def write_objective_csv(history, path) -> None:
    lines = ["iteration,objective"]
    lines += [f"{i},{v!r}" for i, v in enumerate(history)]
    Path(path).write_text("\n".join(lines) + "\n")


def write_metrics_csv(reports: dict[str, MetricReport], path) -> None:
    """One row per named evaluation."""
    lines = ["name," + MetricReport.csv_header()]
    lines += [f"{name},{rep.csv_row()}" for name, rep in reports.items()]
    Path(path).write_text("\n".join(lines) + "\n")


def save_objective_plot(history, path, title: str = "Objective per outer iteration") -> None:
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.semilogy(range(len(history)), history, marker="o", markersize=3)
    ax.set_xlabel("outer iteration")
    ax.set_ylabel("objective")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _false_color_array(cube: HsiCube, bands=None) -> np.ndarray:
    if bands is None:
        bands = default_false_color_bands(cube.bands)
    stack = np.stack([cube.data[b] for b in bands], axis=-1)
    return np.clip(stack, 0.0, 1.0)


def save_comparison_figure(panels: dict[str, HsiCube], path, bands=None) -> None:
    """Row of false-color panels, one per named cube."""
    n = len(panels)
    fig, axes = plt.subplots(1, n, figsize=(3.2 * n, 3.4))
    if n == 1:
        axes = [axes]
    for ax, (name, cube) in zip(axes, panels.items()):
        use = bands if bands is not None and max(bands) < cube.bands else None
        ax.imshow(_false_color_array(cube, use))
        ax.set_title(name, fontsize=10)
        ax.axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_band_psnr_plot(ref: HsiCube, est: HsiCube, path) -> None:
    """Per-band PSNR curve between two same-shape cubes."""
    mses = np.mean((ref.data - est.data) ** 2, axis=(1, 2))
    vals = np.where(mses < 1e-30, 300.0, 10.0 * np.log10(1.0 / np.maximum(mses, 1e-30)))
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(np.arange(ref.bands), vals, marker="o", markersize=3)
    ax.set_xlabel("band")
    ax.set_ylabel("PSNR (dB)")
    ax.set_title("Per-band PSNR")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def format_summary_table(reports: dict[str, MetricReport]) -> str:
    """Fixed-width text table of metric reports."""
    header = f"{'method':<16}{'PSNR':>10}{'SSIM':>10}{'SAM':>10}{'ERGAS':>10}"
    rows = [header, "-" * len(header)]
    for name, rep in reports.items():
        rows.append(
            f"{name:<16}{rep.psnr:>10.4f}{rep.ssim:>10.4f}{rep.sam:>10.4f}{rep.ergas:>10.4f}"
        )
    return "\n".join(rows)
