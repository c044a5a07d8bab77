"""Device parameters and derived linear-response coefficients.

Two Fabry-Perot cavities (A, B) share a partially transmissive middle
mirror M1; the far mirror of cavity B is M2.  Photons tunnel between the
cavities at rate ``g``.  Everything internal is kept in SI units with the
angular-frequency convention (rad/s); conversion from the Hz-style values
quoted at the configuration boundary happens in :mod:`fanocavity.config`.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import SusceptibilityPoleError

HBAR = 1.054571817e-34  # J*s
C_LIGHT = 299792458.0   # m/s


class Topology(enum.Enum):
    """Which mirrors are dynamical.

    FIXED_ENDS: both end mirrors are clamped, only the middle mirror M1
    responds to radiation pressure.  DOUBLE_MOVABLE: the middle mirror M1
    and the far end mirror M2 both respond.
    """

    FIXED_ENDS = "FixedEnds"
    DOUBLE_MOVABLE = "DoubleMovable"


@dataclass(frozen=True)
class PhysicalParams:
    """All device and drive constants, SI with angular frequencies.

    Attributes:
        m1, m2: mirror masses (kg).
        Omega1, Omega2: mechanical angular frequencies (rad/s).
        gamma1, gamma2: mechanical damping rates (rad/s).
        G1, G2: cavity frequency pull per displacement (rad/s per m).
        kappa: total optical decay rate (rad/s), shared by both cavities.
        eta: external coupling fraction kappa_ex/kappa, in (0, 1].
        g: photon tunneling rate through the middle mirror (rad/s).
        Delta1, Delta2: bare pump-cavity detunings (rad/s).
        P_c, P_p: pump and probe powers (W).
        lambda_c: pump wavelength (m); enters only through omega_c when
            converting powers to drive amplitudes.
    """

    m1: float
    m2: float
    Omega1: float
    Omega2: float
    gamma1: float
    gamma2: float
    G1: float
    G2: float
    kappa: float
    eta: float
    g: float
    Delta1: float
    Delta2: float
    P_c: float
    P_p: float
    lambda_c: float = 1.064e-6

    def __post_init__(self):
        for name in ("m1", "m2", "Omega1", "Omega2", "kappa", "lambda_c"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        for name in ("gamma1", "gamma2", "g", "P_c", "P_p"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if not 0 < self.eta <= 1:
            raise ValueError("eta must satisfy 0 < eta <= 1")

    @property
    def omega_c(self) -> float:
        """Pump angular frequency 2*pi*c/lambda_c (rad/s)."""
        return 2 * math.pi * C_LIGHT / self.lambda_c

    @property
    def eps_c(self) -> float:
        """Pump drive amplitude sqrt(P_c/(hbar*omega_c)) (s^-1/2)."""
        return drive_amplitude(self.P_c, self.omega_c)

    @property
    def eps_p(self) -> float:
        """Probe drive amplitude, formed with omega_c like the pump."""
        return drive_amplitude(self.P_p, self.omega_c)

    @property
    def kappa_ex(self) -> float:
        return self.eta * self.kappa

    def replace(self, **changes) -> "PhysicalParams":
        return dataclasses.replace(self, **changes)

    def with_g_over_Om(self, g_over_Om: float) -> "PhysicalParams":
        """Copy with the tunneling rate set as a fraction of Omega1."""
        return self.replace(g=g_over_Om * self.Omega1)


def default_params(**overrides) -> PhysicalParams:
    """Reference device constants used by the reproduction commands.

    20 ng mirrors at 51.8 MHz with 41 kHz damping, 13 GHz/nm frequency
    pull, 15 MHz cavity linewidth at critical coupling, 1 mW pump
    red-detuned by one mechanical frequency, probe at P_c/100.
    """
    base = dict(
        m1=2e-11,
        m2=2e-11,
        Omega1=2 * math.pi * 51.8e6,
        Omega2=2 * math.pi * 51.8e6,
        gamma1=2 * math.pi * 41e3,
        gamma2=2 * math.pi * 41e3,
        G1=2 * math.pi * 1.3e19,
        G2=2 * math.pi * 1.3e19,
        kappa=2 * math.pi * 15e6,
        eta=0.5,
        g=0.0,
        Delta1=-2 * math.pi * 51.8e6,
        Delta2=-2 * math.pi * 51.8e6,
        P_c=1e-3,
        P_p=1e-5,
        lambda_c=1.064e-6,
    )
    base.update(overrides)
    return PhysicalParams(**base)


@dataclass(frozen=True)
class DerivedCoefficients:
    """Sideband denominators at one probe detuning Omega.

    Theta_j = i*DeltaBar_j - kappa/2 is the cavity response coefficient at
    the effective detuning; D1/D3 shift it by +i*Omega (lower-sideband
    channel) and D2/D4 by -i*Omega (upper-sideband channel).
    """

    Theta1: complex
    Theta2: complex
    D1: complex
    D2: complex
    D3: complex
    D4: complex
    DeltaBar1: float
    DeltaBar2: float


def drive_amplitude(P: float, omega: float) -> float:
    """Drive amplitude sqrt(P/(hbar*omega)) for power P at frequency omega.

    Raises:
        ValueError: if omega <= 0 or P < 0.
    """
    if omega <= 0:
        raise ValueError("omega must be strictly positive")
    if P < 0:
        raise ValueError("P must be nonnegative")
    return math.sqrt(P / (HBAR * omega))


def effective_detunings(p: PhysicalParams, topology: Topology,
                        x1: float, x2: float) -> tuple[float, float]:
    """Detunings including the radiation-pressure displacement shifts.

    Cavity A always sees Delta1 + G1*x1.  Cavity B sees
    Delta2 + G2*(x2 - x1) when M2 moves, and Delta2 - G2*x1 when the end
    mirrors are clamped (M1 moving right shortens cavity B).
    """
    d1 = p.Delta1 + p.G1 * x1
    if topology is Topology.DOUBLE_MOVABLE:
        d2 = p.Delta2 + p.G2 * (x2 - x1)
    else:
        d2 = p.Delta2 - p.G2 * x1
    return d1, d2


def mechanical_susceptibility(m: float, Omega_j: float, gamma_j: float,
                              Omega):
    """Displacement response 1/(m*(Omega_j^2 - Omega^2 - i*gamma_j*Omega/2)).

    The damping term follows from the -gamma/2 momentum decay together
    with the e^{-i Omega t} sideband ansatz.  ``Omega`` may be a scalar or
    an ndarray.

    Raises:
        SusceptibilityPoleError: exactly zero denominator, which requires
            gamma_j = 0 and Omega = Omega_j.
    """
    if m <= 0:
        raise ValueError("m must be strictly positive")
    den = m * (Omega_j ** 2 - Omega ** 2 - 0.5j * gamma_j * Omega)
    if np.any(den == 0):
        raise SusceptibilityPoleError(
            "susceptibility pole: undamped oscillator driven on resonance")
    return 1.0 / den


def derived_coefficients(p: PhysicalParams, DeltaBar1: float,
                         DeltaBar2: float, Omega: float) -> DerivedCoefficients:
    """Evaluate the Theta_j / D coefficients at probe detuning Omega."""
    Theta1 = 1j * DeltaBar1 - p.kappa / 2
    Theta2 = 1j * DeltaBar2 - p.kappa / 2
    return DerivedCoefficients(
        Theta1=Theta1,
        Theta2=Theta2,
        D1=Theta1 + 1j * Omega,
        D2=Theta1 - 1j * Omega,
        D3=Theta2 + 1j * Omega,
        D4=Theta2 - 1j * Omega,
        DeltaBar1=DeltaBar1,
        DeltaBar2=DeltaBar2,
    )
