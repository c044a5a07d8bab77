"""Linearized probe response and the backward reflection coefficient.

Splitting every c-number into a steady part and first-order sidebands at
the probe detuning Omega (delta-a = A1m e^{-i Omega t} + A1p e^{+i Omega t},
likewise for cavity B and the displacements) turns the Langevin equations
into a 6x6 complex linear system per Omega.  The dense solve of that
system is the primary computation path.  Two closed-form evaluators for
the normalized backward reflection T_b cover the regimes where one or two
mechanical channels interfere; they carry extra assumptions and serve as
independent validators of the matrix route.

Unknown ordering everywhere: u = (A1m, conj(A1p), B1m, conj(B1p), q1, q2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (AssumptionError, IllConditionedError,
                     SingularCoefficientError)
from .params import (HBAR, PhysicalParams, Topology, mechanical_susceptibility)
from .steady import SteadyState, zero_point_amplitude

#: relative tolerance of the linear-solve residual check
SOLVE_RTOL = 1e-10

#: default |DeltaBar1 - DeltaBar2| / Omega1 accepted by the two-channel
#: closed form, which is derived for equal effective detunings
DETUNING_TOL = 0.02


@dataclass(frozen=True)
class SidebandSolution:
    """First-order sideband amplitudes at one probe detuning.

    ``A_plus_conj`` and ``B_plus_conj`` store the conjugated upper-sideband
    amplitudes, matching the unknowns of the linear system.  For clamped
    end mirrors q2 is identically zero.
    """

    A_minus: complex
    A_plus_conj: complex
    B_minus: complex
    B_plus_conj: complex
    q1: complex
    q2: complex
    Omega: float


@dataclass(frozen=True)
class ReflectionPoint:
    Omega_over_Om: float
    T_b: float
    C_pb_over_eps_p: complex


def _assemble_stack(p: PhysicalParams, topology: Topology, s: SteadyState,
                    omegas: np.ndarray, eps_p: float):
    """Stacked (n,6,6) system matrices and (n,6) right-hand sides."""
    n = omegas.shape[0]
    a, b = s.a_bar, s.b_bar
    Theta1 = 1j * s.DeltaBar1 - p.kappa / 2
    Theta2 = 1j * s.DeltaBar2 - p.kappa / 2
    D1 = Theta1 + 1j * omegas
    D2c = np.conj(Theta1 - 1j * omegas)
    D3 = Theta2 + 1j * omegas
    D4c = np.conj(Theta2 - 1j * omegas)
    inv_chi1 = 1.0 / mechanical_susceptibility(p.m1, p.Omega1, p.gamma1, omegas)
    M = np.zeros((n, 6, 6), dtype=complex)
    rhs = np.zeros((n, 6), dtype=complex)

    M[:, 0, 0] = D1
    M[:, 0, 2] = -1j * p.g
    M[:, 0, 4] = 1j * p.G1 * a
    rhs[:, 0] = -math.sqrt(p.eta * p.kappa) * eps_p

    M[:, 1, 1] = D2c
    M[:, 1, 3] = 1j * p.g
    M[:, 1, 4] = -1j * p.G1 * np.conj(a)

    M[:, 2, 2] = D3
    M[:, 2, 0] = -1j * p.g
    M[:, 2, 4] = -1j * p.G2 * b
    M[:, 3, 3] = D4c
    M[:, 3, 1] = 1j * p.g
    M[:, 3, 4] = 1j * p.G2 * np.conj(b)
    if topology is Topology.DOUBLE_MOVABLE:
        M[:, 2, 5] = 1j * p.G2 * b
        M[:, 3, 5] = -1j * p.G2 * np.conj(b)

    M[:, 4, 4] = inv_chi1
    M[:, 4, 0] = -HBAR * p.G1 * np.conj(a)
    M[:, 4, 1] = -HBAR * p.G1 * a
    M[:, 4, 2] = HBAR * p.G2 * np.conj(b)
    M[:, 4, 3] = HBAR * p.G2 * b

    if topology is Topology.DOUBLE_MOVABLE:
        M[:, 5, 5] = 1.0 / mechanical_susceptibility(p.m2, p.Omega2,
                                                     p.gamma2, omegas)
        M[:, 5, 2] = -HBAR * p.G2 * np.conj(b)
        M[:, 5, 3] = -HBAR * p.G2 * b
    else:
        M[:, 5, 5] = 1.0

    return M, rhs


def assemble_sideband_system(p: PhysicalParams, topology: Topology,
                             s: SteadyState, Omega: float):
    """Raw (unscaled) 6x6 system matrix and right-hand side at one Omega.

    The probe drive uses the probe amplitude derived from ``p.P_p``.
    """
    M, rhs = _assemble_stack(p, topology, s, np.atleast_1d(float(Omega)),
                             p.eps_p)
    return M[0], rhs[0]


def _scaled_solve(M: np.ndarray, rhs: np.ndarray, p: PhysicalParams):
    """Solve stacked systems with displacement-column scaling, row
    equilibration and one step of iterative refinement.

    Raw SI entries span ~20 orders of magnitude (optical rows ~kappa,
    force rows ~hbar*G*a).  Scaling the q columns by the zero-point
    amplitudes and equilibrating rows by their max modulus brings all
    entries within a few orders before factorization.

    Returns (u, raw residual norms, rhs norms).
    """
    col = np.ones(6)
    col[4] = zero_point_amplitude(p.m1, p.Omega1)
    col[5] = zero_point_amplitude(p.m2, p.Omega2)
    Ms = M * col[None, None, :]
    row = np.abs(Ms).max(axis=2)
    row[row == 0] = 1.0
    Ms = Ms / row[:, :, None]
    rs = rhs / row
    u = np.linalg.solve(Ms, rs[..., None])[..., 0]
    resid = rs - np.einsum("nij,nj->ni", Ms, u)
    u = u + np.linalg.solve(Ms, resid[..., None])[..., 0]
    u = u * col[None, :]
    raw_resid = rhs - np.einsum("nij,nj->ni", M, u)
    return (u, np.linalg.norm(raw_resid, axis=1),
            np.linalg.norm(rhs, axis=1))


def solve_sidebands(p: PhysicalParams, topology: Topology, s: SteadyState,
                    Omega: float, eps_p: float | None = None) -> SidebandSolution:
    """Solve the linearized system at one probe detuning.

    Raises:
        IllConditionedError: the post-refinement residual exceeds
            SOLVE_RTOL times the drive norm; the error carries a condition
            estimate of the scaled matrix.
    """
    if eps_p is None:
        eps_p = p.eps_p
    omegas = np.atleast_1d(float(Omega))
    M, rhs = _assemble_stack(p, topology, s, omegas, eps_p)
    try:
        u, rnorm, bnorm = _scaled_solve(M, rhs, p)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError(f"singular sideband system: {exc}") from exc
    if rnorm[0] > SOLVE_RTOL * bnorm[0]:
        cond = float(np.linalg.cond(M[0]))
        raise IllConditionedError(
            f"solve residual {rnorm[0]:.3e} exceeds {SOLVE_RTOL:.0e} * "
            f"|rhs| = {SOLVE_RTOL * bnorm[0]:.3e}", condition=cond)
    v = u[0]
    return SidebandSolution(A_minus=v[0], A_plus_conj=v[1], B_minus=v[2],
                            B_plus_conj=v[3], q1=v[4], q2=v[5],
                            Omega=float(Omega))


def reflection_point(p: PhysicalParams, solution: SidebandSolution,
                     eps_p: float) -> ReflectionPoint:
    """Normalized backward reflection from the anti-Stokes amplitude.

    C_pb/eps_p = 1 - sqrt(eta kappa) A1m / eps_p and T_b = |C_pb/eps_p|^2.
    """
    if eps_p <= 0:
        raise ValueError("eps_p must be positive to normalize the reflection")
    cpb = 1 - math.sqrt(p.eta * p.kappa) * solution.A_minus / eps_p
    return ReflectionPoint(Omega_over_Om=solution.Omega / p.Omega1,
                           T_b=abs(cpb) ** 2, C_pb_over_eps_p=cpb)


def steady_reflection(p: PhysicalParams, s: SteadyState) -> complex:
    """Reflected pump amplitude eps_c - sqrt(eta kappa) a_bar."""
    return p.eps_c - math.sqrt(p.eta * p.kappa) * s.a_bar


def solve_reflection_grid(p: PhysicalParams, topology: Topology,
                          s: SteadyState, omegas: np.ndarray,
                          eps_p: float | None = None):
    """Batched matrix-route reflection over a grid of probe detunings.

    Returns (cpb_over_eps_p array, gaps) where gaps is a list of
    (grid index, message) for points whose solve failed; failed entries
    of the array are NaN.
    """
    if eps_p is None:
        eps_p = p.eps_p
    if eps_p <= 0:
        raise ValueError("eps_p must be positive to normalize the reflection")
    omegas = np.asarray(omegas, dtype=float)
    M, rhs = _assemble_stack(p, topology, s, omegas, eps_p)
    gaps: list[tuple[int, str]] = []
    try:
        u, rnorm, bnorm = _scaled_solve(M, rhs, p)
        bad = np.flatnonzero(rnorm > SOLVE_RTOL * bnorm)
    except np.linalg.LinAlgError:
        u = np.full((omegas.shape[0], 6), np.nan, dtype=complex)
        bad = np.arange(omegas.shape[0])
    a_minus = u[:, 0].copy()
    for i in bad:
        try:
            a_minus[i] = solve_sidebands(p, topology, s, float(omegas[i]),
                                         eps_p).A_minus
        except IllConditionedError as exc:
            a_minus[i] = np.nan
            gaps.append((int(i), str(exc)))
    cpb = 1 - math.sqrt(p.eta * p.kappa) * a_minus / eps_p
    return cpb, gaps


def _chi(p: PhysicalParams, which: int, Omega):
    if which == 1:
        return mechanical_susceptibility(p.m1, p.Omega1, p.gamma1, Omega)
    return mechanical_susceptibility(p.m2, p.Omega2, p.gamma2, Omega)


def _check_nonzero(values, what: str):
    if np.any(np.abs(values) == 0):
        raise SingularCoefficientError(f"{what} vanished")


def single_fano_reflection(p: PhysicalParams, s: SteadyState, Omega):
    """Closed-form C_pb/eps_p for one mechanical channel (clamped ends).

    Valid for equal pull rates G1 = G2; the interference of the direct
    probe path with the single mechanical path is summed analytically.
    ``Omega`` may be a scalar or ndarray.
    """
    if abs(p.G1 - p.G2) > 1e-9 * max(abs(p.G1), abs(p.G2)):
        raise AssumptionError("single-channel closed form requires G1 == G2")
    if s.x2_bar != 0.0:
        raise AssumptionError(
            "steady state has a displaced end mirror; this closed form "
            "applies to the clamped-ends topology")
    G, g = p.G1, p.g
    a, b = s.a_bar, s.b_bar
    na, nb = abs(a) ** 2, abs(b) ** 2
    cross = np.conj(a) * b + a * np.conj(b)
    Theta1 = 1j * s.DeltaBar1 - p.kappa / 2
    Theta2 = 1j * s.DeltaBar2 - p.kappa / 2
    D1 = Theta1 + 1j * Omega
    D3 = Theta2 + 1j * Omega
    D2c = np.conj(Theta1 - 1j * Omega)
    D4c = np.conj(Theta2 - 1j * Omega)
    den13 = D1 * D3 + g ** 2
    den24 = D2c * D4c + g ** 2
    _check_nonzero(den13, "lower-channel denominator D1*D3 + g^2")
    _check_nonzero(den24, "upper-channel denominator D2* D4* + g^2")
    if G == 0:
        # mechanical channel decoupled: bare coupled-cavity reflection
        return 1 + p.eta * p.kappa * D3 / den13
    c1 = (-g * G * cross - 1j * G * (D3 * na + D1 * nb)) / den13
    c2 = (-g * G * cross + 1j * G * (D4c * na + D2c * nb)) / den24
    c3 = -1.0 / (HBAR * G * _chi(p, 1, Omega))
    csum = c1 + c2 + c3
    _check_nonzero(csum, "mechanical coefficient sum")
    num = 1j * g ** 2 * G * nb - 1j * G * D3 ** 2 * na - g * D3 * G * cross
    return 1 - p.eta * p.kappa * (num / (den13 ** 2 * csum) - D3 / den13)


def closed_form_single_fano_Tb(p: PhysicalParams, s: SteadyState,
                               Omega) -> float:
    """T_b from the one-channel closed form; see single_fano_reflection."""
    return np.abs(single_fano_reflection(p, s, Omega)) ** 2


def double_fano_reflection(p: PhysicalParams, s: SteadyState, Omega, *,
                           detuning_tol: float = DETUNING_TOL):
    """Closed-form C_pb/eps_p with both mechanical channels active.

    Derived for equal effective detunings; the second channel enters
    through its back-action ratio A/B and the cross couplings C11, C22.
    ``Omega`` may be a scalar or ndarray.

    Raises:
        AssumptionError: |DeltaBar1 - DeltaBar2| > detuning_tol * Omega1.
    """
    if abs(s.DeltaBar1 - s.DeltaBar2) > detuning_tol * p.Omega1:
        raise AssumptionError(
            "two-channel closed form requires nearly equal effective "
            f"detunings; |difference|/Omega1 = "
            f"{abs(s.DeltaBar1 - s.DeltaBar2) / p.Omega1:.3e} exceeds "
            f"{detuning_tol:g}")
    G1, G2, g = p.G1, p.G2, p.g
    a, b = s.a_bar, s.b_bar
    na, nb = abs(a) ** 2, abs(b) ** 2
    ab_c = a * np.conj(b)
    a_cb = np.conj(a) * b
    Theta1 = 1j * s.DeltaBar1 - p.kappa / 2
    D1 = Theta1 + 1j * Omega
    D2c = np.conj(Theta1 - 1j * Omega)
    den1 = D1 ** 2 + g ** 2
    den2 = D2c ** 2 + g ** 2
    _check_nonzero(den1, "lower-channel denominator D1^2 + g^2")
    _check_nonzero(den2, "upper-channel denominator (D2*)^2 + g^2")
    if G1 == 0 and G2 == 0:
        # both mechanical channels decoupled
        return 1 + p.eta * p.kappa * D1 / den1
    if G1 == 0 or G2 == 0:
        raise AssumptionError(
            "two-channel closed form needs both pull rates nonzero "
            "(or both zero)")
    A = (-(g * G1 * ab_c + 1j * D1 * G2 * nb) / den1
         - (g * G1 * a_cb - 1j * G2 * D2c * nb) / den2)
    B = (1j * G2 * D2c * nb / den2 - 1j * D1 * G2 * nb / den1
         - 1.0 / (HBAR * G2 * _chi(p, 2, Omega)))
    _check_nonzero(B, "end-mirror back-action coefficient B")
    ab_ratio = A / B
    c11 = (g * G1 * a_cb + 1j * G2 * D1 * nb) / (B * den1)
    c22 = (g * G1 * ab_c - 1j * G2 * D2c * nb) / (B * den2)
    c1 = (-g * G2 * ((1 - ab_ratio) * ab_c + a_cb)
          + 1j * G2 ** 2 * (1 - ab_ratio) * nb * D2c / G1
          + 1j * G1 * na * D2c) / den2
    c2 = (-g * G2 * ((1 - ab_ratio) * a_cb + ab_c)
          - 1j * G2 ** 2 * (1 - ab_ratio) * nb * D1 / G1
          - 1j * G1 * na * D1) / den1
    c3 = -1.0 / (HBAR * G1 * _chi(p, 1, Omega))
    csum = c1 + c2 + c3
    _check_nonzero(csum, "mechanical coefficient sum")
    num = (1j * g ** 2 * G2 ** 2 * (1 - ab_ratio) * (1 + c11 + c22) / G1 * nb
           - 1j * G1 * D1 ** 2 * na
           - D1 * g * G2 * ((1 - ab_ratio) * a_cb + (1 + c11 + c22) * ab_c))
    return 1 - p.eta * p.kappa * (num / (den1 ** 2 * csum)
                                  + 1j * g ** 2 * G2 * nb / (B * den1 ** 2)
                                  - D1 / den1)


def closed_form_double_fano_Tb(p: PhysicalParams, s: SteadyState, Omega, *,
                               detuning_tol: float = DETUNING_TOL) -> float:
    """T_b from the two-channel closed form; see double_fano_reflection."""
    return np.abs(double_fano_reflection(
        p, s, Omega, detuning_tol=detuning_tol)) ** 2
