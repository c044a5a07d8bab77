"""CSV emission and figure rendering for the reproduction commands.

CSV files are the authoritative output: 17-significant-digit floats,
``\\n`` line endings, header always present, written atomically
(temp-then-rename) so a crashed run never leaves a half-written file.
Figures are rendered with matplotlib to PNG (and SVG on request) with
deterministic settings so repeated runs produce identical bytes.
"""

from __future__ import annotations

import os
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "fanocavity"

import matplotlib.pyplot as plt  # noqa: E402

from .fitting import MODEL_NAMES, PARAM_NAMES, FitResult, eval_model  # noqa: E402
from .lineshape import SeparationCurve  # noqa: E402
from .spectrum import IntensityRow, Spectrum  # noqa: E402

SPECTRUM_HEADER = ["omega_over_Om", "T_b"]
SEPARATION_HEADER = ["g_over_Om", "separation_over_Om", "x1_bar_scaled",
                     "x2_bar_scaled"]
INTENSITY_HEADER = ["g_over_Om", "n_a", "n_b", "ratio"]
FIT_REPORT_HEADER = ["model", "param_name", "value"]
STEADY_HEADER = ["key", "value"]


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(path: Path, header: list[str], rows) -> None:
    """Write rectangular rows under a header, atomically."""
    rows = [list(r) for r in rows]
    for r in rows:
        if len(r) != len(header):
            raise ValueError(
                f"row of width {len(r)} does not match header width "
                f"{len(header)} in {path}")
    lines = [",".join(header)]
    lines.extend(",".join(format_cell(c) for c in r) for r in rows)
    text = "\n".join(lines) + "\n"
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text, encoding="utf-8", newline="")
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _savefig(fig, path: Path, emit_svg: bool) -> list[Path]:
    """Save PNG always, SVG alongside when requested; deterministic bytes."""
    written = []
    png = path.with_suffix(".png")
    fig.savefig(png, dpi=150)
    written.append(png)
    if emit_svg:
        svg = path.with_suffix(".svg")
        fig.savefig(svg, metadata={"Date": None})
        written.append(svg)
    plt.close(fig)
    return written


def render_spectra_figure(spectra: list[Spectrum], path: Path,
                          emit_svg: bool = False) -> list[Path]:
    """Panel grid of T_b vs Omega/Omega_m, one panel per tunneling rate."""
    if not spectra:
        raise ValueError("no spectra to render")
    n = len(spectra)
    ncols = min(2, n)
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(4.2 * ncols, 2.8 * nrows),
                             squeeze=False, sharex=True)
    for i, spec in enumerate(spectra):
        ax = axes[i // ncols][i % ncols]
        ax.plot(spec.positions(), spec.values(), lw=1.0)
        ax.set_title(f"$g/\\Omega_m$ = {spec.g_over_Om:g}", fontsize=9)
        ax.set_ylabel("$T_b$", fontsize=9)
        ax.tick_params(labelsize=8)
    for i in range(n, nrows * ncols):
        axes[i // ncols][i % ncols].set_visible(False)
    for ax in axes[-1]:
        ax.set_xlabel("$\\Omega/\\Omega_m$", fontsize=9)
    fig.tight_layout()
    return _savefig(fig, path, emit_svg)


def render_separation_figure(curve: SeparationCurve, fits: list[FitResult],
                             path: Path, emit_svg: bool = False) -> list[Path]:
    """Separation and scaled displacements vs g, plus the fitted profiles."""
    rows = [r for r in curve.rows if r.separation_over_Om is not None]
    if not rows:
        raise ValueError("separation curve has no measured rows")
    g_all = [r.g_over_Om for r in curve.rows]
    g = [r.g_over_Om for r in rows]
    sep = [r.separation_over_Om for r in rows]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(5.2, 6.0))
    ax1.plot(g, sep, "o-", ms=3, lw=1.0, label="separation")
    ax1.plot(g_all, [r.x1_bar_scaled for r in curve.rows], "s--", ms=3,
             lw=1.0, label=f"$\\bar{{x}}_1 \\times$ {curve.scale:g}")
    ax1.plot(g_all, [r.x2_bar_scaled for r in curve.rows], "^--", ms=3,
             lw=1.0, label=f"$\\bar{{x}}_2 \\times$ {curve.scale:g}")
    ax1.set_xlabel("$g/\\Omega_m$", fontsize=9)
    ax1.set_ylabel("$\\Omega/\\Omega_m$", fontsize=9)
    ax1.legend(fontsize=8, frameon=False)
    ax2.plot(g, sep, "ko", ms=3, label="measured")
    if fits:
        import numpy as np
        xs = np.linspace(min(g), max(g), 400)
        for fit in fits:
            name = MODEL_NAMES[type(fit.model)]
            ax2.plot(xs, eval_model(fit.model, xs), lw=1.0,
                     label=f"{name} ($\\chi^2$/dof = {fit.chi2_per_dof:.2e})")
    ax2.set_xlabel("$g/\\Omega_m$", fontsize=9)
    ax2.set_ylabel("separation ($\\Omega/\\Omega_m$)", fontsize=9)
    ax2.legend(fontsize=8, frameon=False)
    for ax in (ax1, ax2):
        ax.tick_params(labelsize=8)
    fig.tight_layout()
    return _savefig(fig, path, emit_svg)


def render_intensity_figure(rows: list[IntensityRow], path: Path,
                            emit_svg: bool = False) -> list[Path]:
    """Steady photon numbers of both cavities vs tunneling rate."""
    if not rows:
        raise ValueError("no intensity rows to render")
    g = [r.g_over_Om for r in rows]
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(g, [r.n_a for r in rows], "o-", ms=3, lw=1.0,
            label="cavity A  $|\\bar{a}|^2$")
    ax.plot(g, [r.n_b for r in rows], "s-", ms=3, lw=1.0,
            label="cavity B  $|\\bar{b}|^2$")
    ax.set_xlabel("$g/\\Omega_m$", fontsize=9)
    ax.set_ylabel("photon number", fontsize=9)
    ax.tick_params(labelsize=8)
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    return _savefig(fig, path, emit_svg)


def fit_report_rows(fits: list[FitResult]) -> list[list]:
    """(model, param_name, value) rows, chi2_per_dof appended per model."""
    rows: list[list] = []
    for fit in fits:
        name = MODEL_NAMES[type(fit.model)]
        for pname in PARAM_NAMES[type(fit.model)]:
            rows.append([name, pname, float(getattr(fit.model, pname))])
        rows.append([name, "chi2_per_dof", float(fit.chi2_per_dof)])
        rows.append([name, "converged", int(fit.converged)])
    return rows
