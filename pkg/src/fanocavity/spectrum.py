"""Reflection spectra over probe-detuning grids and tunneling-rate sweeps.

The pump-only steady state does not depend on the probe detuning, so each
spectrum costs one steady-state solve plus one batched linear solve over
the grid.  Grid points are independent work units; per-point singularities
are recorded as gaps instead of aborting a sweep.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import FanoCavityError
from .params import PhysicalParams, Topology
from .sidebands import (ReflectionPoint, double_fano_reflection,
                        single_fano_reflection, solve_reflection_grid)
from .steady import SolveOptions, SteadyState, solve_steady_state


class Method(enum.Enum):
    MATRIX_SOLVE = "matrix"
    CLOSED_FORM = "closed"


@dataclass(frozen=True)
class GridSpec:
    """Probe-detuning window in units of Omega/Omega_m."""

    omega_min_over_Om: float = 0.98
    omega_max_over_Om: float = 1.02
    n_points: int = 4001

    def __post_init__(self):
        if not self.omega_min_over_Om < self.omega_max_over_Om:
            raise ValueError("grid requires omega_min < omega_max")
        if self.n_points < 2:
            raise ValueError("grid requires at least 2 points")

    def values(self) -> np.ndarray:
        return np.linspace(self.omega_min_over_Om, self.omega_max_over_Om,
                           self.n_points)


@dataclass(frozen=True)
class Spectrum:
    """T_b over one grid, with full provenance of how it was produced."""

    grid: GridSpec
    points: tuple[ReflectionPoint, ...]
    g_over_Om: float
    topology: Topology
    method: Method
    steady: SteadyState
    gaps: tuple[tuple[int, str], ...] = field(default=())

    def positions(self) -> np.ndarray:
        return np.array([pt.Omega_over_Om for pt in self.points])

    def values(self) -> np.ndarray:
        return np.array([pt.T_b for pt in self.points])


@dataclass(frozen=True)
class IntensityRow:
    g_over_Om: float
    n_a: float
    n_b: float
    ratio: float


def compute_spectrum(p: PhysicalParams, topology: Topology,
                     grid: GridSpec | None = None,
                     method: Method = Method.MATRIX_SOLVE,
                     solve_options: SolveOptions | None = None) -> Spectrum:
    """One steady-state solve, then per-grid-point sideband evaluation."""
    grid = grid or GridSpec()
    steady = solve_steady_state(p, topology, solve_options)
    x = grid.values()
    omegas = x * p.Omega1
    gaps: list[tuple[int, str]] = []
    if method is Method.MATRIX_SOLVE:
        cpb, gaps = solve_reflection_grid(p, topology, steady, omegas)
    else:
        if topology is Topology.FIXED_ENDS:
            cpb = single_fano_reflection(p, steady, omegas)
        else:
            cpb = double_fano_reflection(p, steady, omegas)
    tb = np.abs(cpb) ** 2
    finite = np.isfinite(tb)
    for i in np.flatnonzero(~finite):
        if not any(i == gi for gi, _ in gaps):
            gaps.append((int(i), "non-finite reflection value"))
    points = tuple(ReflectionPoint(Omega_over_Om=float(x[i]),
                                   T_b=float(tb[i]),
                                   C_pb_over_eps_p=complex(cpb[i]))
                   for i in np.flatnonzero(finite))
    return Spectrum(grid=grid, points=points, g_over_Om=p.g / p.Omega1,
                    topology=topology, method=method, steady=steady,
                    gaps=tuple(sorted(gaps)))


def sweep_tunneling(p: PhysicalParams, topology: Topology,
                    grid: GridSpec | None = None,
                    g_over_Om_list=(0.0,),
                    method: Method = Method.MATRIX_SOLVE,
                    solve_options: SolveOptions | None = None):
    """Independent spectra for each tunneling rate, order preserved.

    Returns (spectra, failures); a failed g contributes no spectrum and an
    entry (g_over_Om, exception) in failures.
    """
    g_list = list(g_over_Om_list)
    if not g_list:
        raise ValueError("g list must be nonempty")
    if any(g < 0 for g in g_list):
        raise ValueError("g values must be nonnegative")
    spectra: list[Spectrum] = []
    failures: list[tuple[float, FanoCavityError]] = []
    for g in g_list:
        try:
            spectra.append(compute_spectrum(p.with_g_over_Om(g), topology,
                                            grid, method, solve_options))
        except FanoCavityError as exc:
            failures.append((g, exc))
    return spectra, failures


def intensity_table(p: PhysicalParams, topology: Topology,
                    g_over_Om_list,
                    solve_options: SolveOptions | None = None) -> list[IntensityRow]:
    """Steady photon numbers |a_bar|^2, |b_bar|^2 per tunneling rate.

    The ratio column repeats n_b/n_a (zero when undriven), which equals
    g^2/(DeltaBar2^2 + kappa^2/4) identically.
    """
    rows = []
    for g in g_over_Om_list:
        s = solve_steady_state(p.with_g_over_Om(g), topology, solve_options)
        n_a = abs(s.a_bar) ** 2
        n_b = abs(s.b_bar) ** 2
        rows.append(IntensityRow(g_over_Om=float(g), n_a=n_a, n_b=n_b,
                                 ratio=(n_b / n_a if n_a > 0 else 0.0)))
    return rows
