"""Command-line front end: reproduction commands and fitting.

Every subcommand is a pure function of its RunConfig: repeated runs emit
byte-identical CSVs.  Outputs are written only after the computation
succeeds; when part of a sweep fails, the files that could be produced are
written with a ``.partial`` suffix and the exit status is nonzero.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import report
from .config import RunConfig, load_config
from .errors import FanoCavityError
from .fitting import GeneralizedLogistic, Moffat, fit_least_squares
from .lineshape import separation_vs_g
from .params import Topology
from .spectrum import GridSpec, Method, compute_spectrum, intensity_table, \
    sweep_tunneling
from .steady import solve_steady_state

FIG5_G_MIN = 0.4
FIG5_G_MAX = 1.0
FIG5_N_G = 25
#: window wide enough to keep both Fano dips in view up to g = Omega_m
FIG5_GRID = GridSpec(omega_min_over_Om=0.90, omega_max_over_Om=1.10,
                     n_points=8001)
#: dense tunneling-rate grid for the intensity curves
FIG7_G_LIST = tuple(i / 100 for i in range(0, 101, 2))


def _common(fn):
    fn = click.option("--config", "config_path", type=click.Path(),
                      default=None, help="Flat key/value config file.")(fn)
    fn = click.option("--out", "out_dir", type=click.Path(), default="out",
                      show_default=True, help="Output directory.")(fn)
    fn = click.option("--svg", "emit_svg", is_flag=True,
                      help="Also render SVG figures.")(fn)
    fn = click.option("--method", type=click.Choice(["matrix", "closed"]),
                      default="matrix", show_default=True,
                      help="Sideband evaluation route.")(fn)
    return fn


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _load(config_path, out_dir, emit_svg, method) -> RunConfig:
    try:
        cfg = load_config(config_path)
    except FanoCavityError as exc:
        _fail(str(exc))
    return cfg.with_overrides(output_dir=Path(out_dir),
                              emit_svg=emit_svg,
                              method=Method(method))


def _g_tag(g: float) -> str:
    return format(g, "g")


def _write_sweep(cfg: RunConfig, name: str, topology: Topology):
    """Shared body of the spectrum/fig3/fig4 commands."""
    spectra, failures = sweep_tunneling(cfg.params, topology, cfg.grid,
                                        cfg.g_list, cfg.method)
    suffix = ".partial" if failures else ""
    outdir = cfg.output_dir
    outdir.mkdir(parents=True, exist_ok=True)
    for spec in spectra:
        rows = [[pt.Omega_over_Om, pt.T_b] for pt in spec.points]
        report.write_csv(outdir / f"{name}_g{_g_tag(spec.g_over_Om)}.csv{suffix}",
                         report.SPECTRUM_HEADER, rows)
    if spectra:
        report.render_spectra_figure(spectra, outdir / f"{name}{suffix}",
                                     cfg.emit_svg)
    for g, exc in failures:
        click.echo(f"error: g/Omega_m = {g:g}: {exc}", err=True)
    if failures:
        sys.exit(1)
    click.echo(f"{name}: wrote {len(spectra)} spectra to {outdir}")


@click.group()
def main():
    """Double-cavity optomechanics: steady states, reflection spectra and
    Fano line-shape analysis."""


@main.command()
@_common
def steady(config_path, out_dir, emit_svg, method):
    """Solve the pump-only steady state and report it as key/value rows."""
    cfg = _load(config_path, out_dir, emit_svg, method)
    try:
        g = cfg.g_list[0]
        s = solve_steady_state(cfg.params.with_g_over_Om(g), cfg.topology)
    except FanoCavityError as exc:
        _fail(str(exc))
    rows = [
        ["topology", cfg.topology.value],
        ["g_over_Om", float(g)],
        ["a_bar_re", s.a_bar.real], ["a_bar_im", s.a_bar.imag],
        ["b_bar_re", s.b_bar.real], ["b_bar_im", s.b_bar.imag],
        ["n_a", abs(s.a_bar) ** 2], ["n_b", abs(s.b_bar) ** 2],
        ["x1_bar_m", s.x1_bar], ["x2_bar_m", s.x2_bar],
        ["DeltaBar1_rad_s", s.DeltaBar1], ["DeltaBar2_rad_s", s.DeltaBar2],
        ["iterations", s.iterations], ["residual", s.residual],
    ]
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    report.write_csv(cfg.output_dir / "steady.csv", report.STEADY_HEADER, rows)
    for key, value in rows:
        click.echo(f"{key} = {report.format_cell(value)}")


@main.command()
@_common
def spectrum(config_path, out_dir, emit_svg, method):
    """Reflection spectra for the configured topology and g list."""
    cfg = _load(config_path, out_dir, emit_svg, method)
    try:
        _write_sweep(cfg, "spectrum", cfg.topology)
    except FanoCavityError as exc:
        _fail(str(exc))


@main.command()
@_common
def fig3(config_path, out_dir, emit_svg, method):
    """Reflection spectra with clamped end mirrors (single Fano family)."""
    cfg = _load(config_path, out_dir, emit_svg, method)
    try:
        _write_sweep(cfg, "fig3", Topology.FIXED_ENDS)
    except FanoCavityError as exc:
        _fail(str(exc))


@main.command()
@_common
def fig4(config_path, out_dir, emit_svg, method):
    """Reflection spectra with both movable mirrors (double Fano family)."""
    cfg = _load(config_path, out_dir, emit_svg, method)
    try:
        _write_sweep(cfg, "fig4", Topology.DOUBLE_MOVABLE)
    except FanoCavityError as exc:
        _fail(str(exc))


@main.command()
@_common
def fig5(config_path, out_dir, emit_svg, method):
    """Separation-vs-g curve with scaled displacements and both fits."""
    cfg = _load(config_path, out_dir, emit_svg, method)
    try:
        curve = separation_vs_g(cfg.params, FIG5_GRID, FIG5_G_MIN,
                                FIG5_G_MAX, FIG5_N_G, scale=cfg.scale_xbar,
                                prominence=cfg.prominence, method=cfg.method)
        data = [(r.g_over_Om, r.separation_over_Om) for r in curve.rows
                if r.separation_over_Om is not None]
        if len(data) < 6:
            raise FanoCavityError(
                f"only {len(data)} measured separations; cannot fit")
        fits = [fit_least_squares(GeneralizedLogistic, data),
                fit_least_squares(Moffat, data)]
    except FanoCavityError as exc:
        _fail(str(exc))
    outdir = cfg.output_dir
    outdir.mkdir(parents=True, exist_ok=True)
    rows = [[r.g_over_Om, r.separation_over_Om, r.x1_bar_scaled,
             r.x2_bar_scaled] for r in curve.rows]
    report.write_csv(outdir / "fig5.csv", report.SEPARATION_HEADER, rows)
    report.write_csv(outdir / "fig5_fits.csv", report.FIT_REPORT_HEADER,
                     report.fit_report_rows(fits))
    report.render_separation_figure(curve, fits, outdir / "fig5",
                                    cfg.emit_svg)
    click.echo(f"fig5: wrote separation curve ({len(rows)} rows) and fits "
               f"to {outdir}")


@main.command()
@_common
def fig7(config_path, out_dir, emit_svg, method):
    """Steady intracavity photon numbers across tunneling rates."""
    cfg = _load(config_path, out_dir, emit_svg, method)
    try:
        rows = intensity_table(cfg.params, cfg.topology, FIG7_G_LIST)
    except FanoCavityError as exc:
        _fail(str(exc))
    outdir = cfg.output_dir
    outdir.mkdir(parents=True, exist_ok=True)
    report.write_csv(outdir / "fig7.csv", report.INTENSITY_HEADER,
                     [[r.g_over_Om, r.n_a, r.n_b, r.ratio] for r in rows])
    report.render_intensity_figure(rows, outdir / "fig7", cfg.emit_svg)
    click.echo(f"fig7: wrote {len(rows)} rows to {outdir}")


def _read_xy_csv(path: Path) -> list[tuple[float, float]]:
    """First two columns of a CSV as (x, y); header and rows with a
    missing second field are skipped."""
    data = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise FanoCavityError(f"cannot read {path}: {exc}") from exc
    for line in lines:
        parts = [cell.strip() for cell in line.split(",")]
        if len(parts) < 2 or not parts[1]:
            continue
        try:
            data.append((float(parts[0]), float(parts[1])))
        except ValueError:
            continue  # header or non-numeric row
    if not data:
        raise FanoCavityError(f"no numeric (x, y) rows found in {path}")
    return data


@main.command()
@click.argument("data_csv", type=click.Path())
@_common
def fit(data_csv, config_path, out_dir, emit_svg, method):
    """Fit both separation profiles to the first two columns of DATA_CSV."""
    cfg = _load(config_path, out_dir, emit_svg, method)
    try:
        data = _read_xy_csv(Path(data_csv))
        fits = [fit_least_squares(GeneralizedLogistic, data),
                fit_least_squares(Moffat, data)]
    except (FanoCavityError, ValueError) as exc:
        _fail(str(exc))
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    report.write_csv(cfg.output_dir / "fit_report.csv",
                     report.FIT_REPORT_HEADER, report.fit_report_rows(fits))
    for fit_result in fits:
        name = report.MODEL_NAMES[type(fit_result.model)]
        click.echo(f"{name}: chi2_per_dof = "
                   f"{fit_result.chi2_per_dof:.6e} "
                   f"(converged={fit_result.converged})")


if __name__ == "__main__":
    main()
