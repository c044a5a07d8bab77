"""Double-cavity optomechanics with a transmissive middle mirror.

Steady states, linearized backward-reflection spectra (OMIT, single and
double Fano line shapes vs the photon tunneling rate), line-shape
separation analysis and profile fitting.
"""

from .errors import (AssumptionError, ConfigError, ConvergenceError,
                     DegenerateResonanceError, DivergenceError,
                     FanoCavityError, IllConditionedError,
                     InsufficientDipsError, SingularCoefficientError,
                     SusceptibilityPoleError)
from .fitting import (FitResult, GeneralizedLogistic, Moffat, default_inits,
                      eval_model, fit_least_squares)
from .lineshape import (DipFeature, SeparationCurve, SeparationRow,
                        fano_separation, find_dips, find_peaks,
                        separation_vs_g, spearman_rank_correlation)
from .params import (HBAR, DerivedCoefficients, PhysicalParams, Topology,
                     default_params, derived_coefficients, drive_amplitude,
                     effective_detunings, mechanical_susceptibility)
from .sidebands import (ReflectionPoint, SidebandSolution,
                        assemble_sideband_system, closed_form_double_fano_Tb,
                        closed_form_single_fano_Tb, double_fano_reflection,
                        reflection_point, single_fano_reflection,
                        solve_sidebands, steady_reflection)
from .spectrum import (GridSpec, IntensityRow, Method, Spectrum,
                       compute_spectrum, intensity_table, sweep_tunneling)
from .steady import (SolveOptions, SteadyState, cavity_fields_given_positions,
                     intensity_ratio, solve_steady_state, steady_residual,
                     zero_point_amplitude)

__version__ = "0.1.0"

__all__ = [
    "AssumptionError", "ConfigError", "ConvergenceError",
    "DegenerateResonanceError", "DerivedCoefficients", "DipFeature",
    "DivergenceError", "FanoCavityError", "FitResult", "GeneralizedLogistic",
    "GridSpec", "HBAR", "IllConditionedError", "InsufficientDipsError",
    "IntensityRow", "Method", "Moffat", "PhysicalParams", "ReflectionPoint",
    "SeparationCurve", "SeparationRow", "SidebandSolution",
    "SingularCoefficientError", "SolveOptions", "Spectrum", "SteadyState",
    "SusceptibilityPoleError", "Topology", "assemble_sideband_system",
    "cavity_fields_given_positions", "closed_form_double_fano_Tb",
    "closed_form_single_fano_Tb", "compute_spectrum", "default_inits",
    "default_params", "derived_coefficients", "double_fano_reflection",
    "drive_amplitude", "effective_detunings", "eval_model",
    "fano_separation", "find_dips", "find_peaks", "fit_least_squares",
    "intensity_ratio", "intensity_table", "mechanical_susceptibility",
    "reflection_point", "separation_vs_g", "single_fano_reflection",
    "solve_sidebands", "solve_steady_state", "spearman_rank_correlation",
    "steady_reflection", "steady_residual", "sweep_tunneling",
    "zero_point_amplitude",
]
