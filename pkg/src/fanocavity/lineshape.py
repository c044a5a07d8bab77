"""Dip detection, Fano separation measurement and the separation-vs-g curve.

Dips (local minima of T_b) define the Fano feature positions.  Each grid
minimum is refined by a parabola through the point and its two neighbors;
minima whose prominence over the lower adjacent maximum falls below a
threshold are discarded as ripple.  The separation between the two most
prominent dips, tracked against the tunneling rate alongside the scaled
steady displacements, reproduces the line-shape separation analysis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FanoCavityError, InsufficientDipsError
from .params import PhysicalParams, Topology
from .spectrum import GridSpec, Method, Spectrum, compute_spectrum
from .steady import SolveOptions

#: minimum depth below the lower adjacent local maximum for a dip to count
DEFAULT_PROMINENCE = 1e-4

#: steady displacements are multiplied by this for same-axis comparison
DEFAULT_XBAR_SCALE = 1e11


@dataclass(frozen=True)
class DipFeature:
    """One refined local minimum of a spectrum."""

    position_over_Om: float
    depth: float
    grid_index: int
    prominence: float


@dataclass(frozen=True)
class SeparationRow:
    g_over_Om: float
    separation_over_Om: float | None
    x1_bar_scaled: float
    x2_bar_scaled: float


@dataclass(frozen=True)
class SeparationCurve:
    rows: tuple[SeparationRow, ...]
    scale: float


def _parabolic_vertex(x, y, i):
    """Vertex of the parabola through points i-1, i, i+1 (uniform grid)."""
    h = x[i + 1] - x[i]
    denom = y[i - 1] - 2 * y[i] + y[i + 1]
    if denom <= 0:  # not strictly convex; keep the grid point
        return x[i], y[i]
    delta = 0.5 * (y[i - 1] - y[i + 1]) / denom
    delta = min(max(delta, -0.5), 0.5)
    vx = x[i] + delta * h
    vy = y[i] - 0.25 * (y[i - 1] - y[i + 1]) * delta
    return vx, max(vy, 0.0)


def _prominent_minima(x: np.ndarray, y: np.ndarray,
                      prominence: float) -> list[DipFeature]:
    """Strict interior minima of y with parabolic refinement.

    The prominence of a minimum is its depth below the lower of the
    nearest local maxima on each side (window edges stand in when no
    interior maximum exists on that side).
    """
    n = y.shape[0]
    is_max = np.zeros(n, dtype=bool)
    is_max[1:-1] = (y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])
    minima = np.flatnonzero((y[1:-1] < y[:-2]) & (y[1:-1] < y[2:])) + 1
    features = []
    for i in minima:
        j = i - 1
        while j > 0 and not is_max[j]:
            j -= 1
        left = y[j] if is_max[j] else y[0]
        k = i + 1
        while k < n - 1 and not is_max[k]:
            k += 1
        right = y[k] if is_max[k] else y[-1]
        prom = min(left, right) - y[i]
        if prom < prominence:
            continue
        vx, vy = _parabolic_vertex(x, y, i)
        features.append(DipFeature(position_over_Om=float(vx),
                                   depth=float(vy), grid_index=int(i),
                                   prominence=float(prom)))
    return features


def find_dips(spec: Spectrum,
              prominence: float = DEFAULT_PROMINENCE) -> list[DipFeature]:
    """Prominent local minima of T_b, sorted by position."""
    x, y = spec.positions(), spec.values()
    if x.shape[0] < 3:
        raise ValueError("dip detection needs at least 3 points")
    return _prominent_minima(x, y, prominence)


def find_peaks(spec: Spectrum,
               prominence: float = DEFAULT_PROMINENCE) -> list[DipFeature]:
    """Prominent local maxima of T_b, reported with depth = T_b at the peak."""
    x, y = spec.positions(), spec.values()
    if x.shape[0] < 3:
        raise ValueError("peak detection needs at least 3 points")
    flipped = _prominent_minima(x, np.max(y) - y, prominence)
    return [DipFeature(position_over_Om=f.position_over_Om,
                       depth=float(np.max(y)) - f.depth,
                       grid_index=f.grid_index, prominence=f.prominence)
            for f in flipped]


def fano_separation(spec: Spectrum,
                    prominence: float = DEFAULT_PROMINENCE) -> float:
    """Distance (Omega/Omega_m) between the two most prominent dips.

    Raises:
        InsufficientDipsError: fewer than two dips pass the prominence
            filter, which signals the single-feature regime.
    """
    dips = find_dips(spec, prominence)
    if len(dips) < 2:
        raise InsufficientDipsError(
            f"found {len(dips)} dip(s); separation needs two")
    top = sorted(dips, key=lambda d: d.prominence, reverse=True)[:2]
    return abs(top[0].position_over_Om - top[1].position_over_Om)


def separation_vs_g(p: PhysicalParams, grid: GridSpec, g_min: float,
                    g_max: float, n_g: int,
                    scale: float = DEFAULT_XBAR_SCALE,
                    prominence: float = DEFAULT_PROMINENCE,
                    method: Method = Method.MATRIX_SOLVE,
                    solve_options: SolveOptions | None = None) -> SeparationCurve:
    """Separation and scaled steady displacements across tunneling rates.

    Spectra use the movable-end-mirror topology.  A g whose spectrum
    fails or shows fewer than two dips contributes a row with an absent
    separation.
    """
    if not 0 <= g_min < g_max:
        raise ValueError("need 0 <= g_min < g_max")
    if n_g < 2:
        raise ValueError("need at least two g samples")
    rows = []
    for g in np.linspace(g_min, g_max, n_g):
        sep = None
        x1s = x2s = 0.0
        try:
            spec = compute_spectrum(p.with_g_over_Om(float(g)),
                                    Topology.DOUBLE_MOVABLE, grid, method,
                                    solve_options)
            x1s = spec.steady.x1_bar * scale
            x2s = spec.steady.x2_bar * scale
            sep = fano_separation(spec, prominence)
        except FanoCavityError:
            pass
        rows.append(SeparationRow(g_over_Om=float(g),
                                  separation_over_Om=sep,
                                  x1_bar_scaled=x1s, x2_bar_scaled=x2s))
    return SeparationCurve(rows=tuple(rows), scale=scale)


def spearman_rank_correlation(a, b) -> float:
    """Rank correlation of two equal-length sequences (no tie handling)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ra = np.argsort(np.argsort(a)).astype(float)
    rb = np.argsort(np.argsort(b)).astype(float)
    ra -= ra.mean()
    rb -= rb.mean()
    return float((ra * rb).sum() / np.sqrt((ra * ra).sum() * (rb * rb).sum()))
