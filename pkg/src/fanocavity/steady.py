"""Nonlinear steady state of the pump-only system.

With the probe off and all time derivatives zero, the cavity amplitudes
are an exact linear function of the mirror positions, and the positions
balance the radiation-pressure forces.  A damped fixed-point iteration on
(x1, x2) resolves the mutual dependence; the map is strongly contracting
at realistic parameters because G*x_bar << kappa.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .errors import ConvergenceError, DegenerateResonanceError, DivergenceError
from .params import HBAR, PhysicalParams, Topology, effective_detunings


@dataclass(frozen=True)
class SteadyState:
    """Mean fields, displacements and effective detunings at convergence.

    Photon numbers are |a_bar|^2, |b_bar|^2.  ``residual`` is the
    normalized worst-case violation of the steady equations, as computed
    by :func:`steady_residual`.
    """

    a_bar: complex
    b_bar: complex
    x1_bar: float
    x2_bar: float
    DeltaBar1: float
    DeltaBar2: float
    iterations: int
    residual: float


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-12
    max_iter: int = 10000
    damping: float = 0.5
    initial_x1: float = 0.0
    initial_x2: float = 0.0

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must be in (0, 1]")


def zero_point_amplitude(m: float, Omega: float) -> float:
    """Ground-state displacement spread sqrt(hbar/(2*m*Omega))."""
    return math.sqrt(HBAR / (2 * m * Omega))


def cavity_fields_given_positions(p: PhysicalParams, topology: Topology,
                                  x1: float, x2: float) -> tuple[complex, complex]:
    """Exact steady amplitudes (a_bar, b_bar) for frozen mirror positions.

    Solves 0 = Theta1*a - i g b + sqrt(eta kappa) eps_c together with
    0 = Theta2*b - i g a.
    """
    d1, d2 = effective_detunings(p, topology, x1, x2)
    Theta1 = 1j * d1 - p.kappa / 2
    Theta2 = 1j * d2 - p.kappa / 2
    den = Theta1 * Theta2 + p.g ** 2
    # |den| >= (kappa/2)^2 for passive cavities; guard anyway.
    if abs(den) < 1e-12 * (abs(Theta1 * Theta2) + p.g ** 2 + p.kappa ** 2):
        raise DegenerateResonanceError("Theta1*Theta2 + g^2 vanished")
    drive = math.sqrt(p.eta * p.kappa) * p.eps_c
    a = -drive * Theta2 / den
    b = 1j * p.g * a / Theta2
    return a, b


def _position_targets(p: PhysicalParams, topology: Topology,
                      a: complex, b: complex) -> tuple[float, float]:
    na, nb = abs(a) ** 2, abs(b) ** 2
    x1 = HBAR * (p.G1 * na - p.G2 * nb) / (p.m1 * p.Omega1 ** 2)
    if topology is Topology.DOUBLE_MOVABLE:
        x2 = HBAR * p.G2 * nb / (p.m2 * p.Omega2 ** 2)
    else:
        x2 = 0.0
    return x1, x2


def solve_steady_state(p: PhysicalParams, topology: Topology,
                       options: SolveOptions | None = None) -> SteadyState:
    """Damped fixed-point iteration for the self-consistent steady state.

    Starts from ``options.initial_x1/x2`` (default 0; other seeds let a
    caller probe alternative branches if the system is bistable) and
    iterates positions -> fields -> radiation-pressure positions until the
    relative change drops below ``tol``.

    Raises:
        ConvergenceError: iteration cap reached; carries the last iterate.
        DivergenceError: a non-finite iterate appeared.
    """
    o = options or SolveOptions()
    xzp1 = zero_point_amplitude(p.m1, p.Omega1)
    xzp2 = zero_point_amplitude(p.m2, p.Omega2)
    x1, x2 = o.initial_x1, o.initial_x2
    a = b = 0.0 + 0.0j
    iterations = 0
    converged = False
    for iterations in range(1, o.max_iter + 1):
        a, b = cavity_fields_given_positions(p, topology, x1, x2)
        t1, t2 = _position_targets(p, topology, a, b)
        x1_new = (1 - o.damping) * x1 + o.damping * t1
        x2_new = (1 - o.damping) * x2 + o.damping * t2
        if not (math.isfinite(x1_new) and math.isfinite(x2_new)):
            raise DivergenceError(
                f"non-finite displacement at iteration {iterations}")
        change = max(abs(x1_new - x1) / max(abs(x1_new), xzp1),
                     abs(x2_new - x2) / max(abs(x2_new), xzp2))
        x1, x2 = x1_new, x2_new
        if change < o.tol:
            converged = True
            break
    a, b = cavity_fields_given_positions(p, topology, x1, x2)
    d1, d2 = effective_detunings(p, topology, x1, x2)
    state = SteadyState(a_bar=a, b_bar=b, x1_bar=x1, x2_bar=x2,
                        DeltaBar1=d1, DeltaBar2=d2,
                        iterations=iterations, residual=0.0)
    state = dataclasses.replace(
        state, residual=steady_residual(p, topology, state))
    if not converged:
        raise ConvergenceError(
            f"no convergence in {o.max_iter} iterations "
            f"(last relative change {change:.3e}); possible bistability",
            last=state)
    return state


def steady_residual(p: PhysicalParams, topology: Topology,
                    s: SteadyState) -> float:
    """Worst normalized violation of the steady equations at a state.

    Field equations are normalized by the pump drive sqrt(eta kappa)eps_c
    (or taken absolutely when undriven); force balances by
    m_j Omega_j^2 max(|x_j|, x_zp).
    """
    Theta1 = 1j * s.DeltaBar1 - p.kappa / 2
    Theta2 = 1j * s.DeltaBar2 - p.kappa / 2
    drive = math.sqrt(p.eta * p.kappa) * p.eps_c
    fscale = drive if drive > 0 else 1.0
    r_a = abs(Theta1 * s.a_bar - 1j * p.g * s.b_bar + drive) / fscale
    r_b = abs(Theta2 * s.b_bar - 1j * p.g * s.a_bar) / fscale
    na, nb = abs(s.a_bar) ** 2, abs(s.b_bar) ** 2
    f1 = -p.m1 * p.Omega1 ** 2 * s.x1_bar + HBAR * (p.G1 * na - p.G2 * nb)
    m1scale = p.m1 * p.Omega1 ** 2 * max(abs(s.x1_bar),
                                         zero_point_amplitude(p.m1, p.Omega1))
    residuals = [r_a, r_b, abs(f1) / m1scale]
    if topology is Topology.DOUBLE_MOVABLE:
        f2 = -p.m2 * p.Omega2 ** 2 * s.x2_bar + HBAR * p.G2 * nb
        m2scale = p.m2 * p.Omega2 ** 2 * max(abs(s.x2_bar),
                                             zero_point_amplitude(p.m2, p.Omega2))
        residuals.append(abs(f2) / m2scale)
    return max(residuals)


def intensity_ratio(p: PhysicalParams, s: SteadyState) -> float:
    """Photon-number ratio |b_bar|^2/|a_bar|^2.

    Equals g^2/(DeltaBar2^2 + kappa^2/4) identically, from the steady
    relation b_bar*Theta2 = i g a_bar.
    """
    na = abs(s.a_bar) ** 2
    if na == 0:
        raise ValueError("intensity ratio undefined for a_bar = 0")
    return abs(s.b_bar) ** 2 / na
