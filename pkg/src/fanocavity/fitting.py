"""Least-squares fits of the separation curve: Richards logistic and Moffat.

Both profiles are fit with a small Levenberg-Marquardt loop using
finite-difference Jacobians and unweighted residuals (no per-point
uncertainties are available for the measured separations).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

#: damping schedule: start, grow on rejection, shrink on acceptance
LM_LAMBDA0 = 1e-3
LM_GROW = 10.0
LM_SHRINK = 10.0
LM_LAMBDA_MAX = 1e12
LM_MAX_ITER = 500
#: accepted-step convergence thresholds
LM_CHI2_RTOL = 1e-10
LM_STEP_TOL = 1e-12


@dataclass(frozen=True)
class GeneralizedLogistic:
    """Richards sigmoid a + c/(1 + T e^{-B(x-M)})^(1/T); T=1 is logistic."""

    a: float
    c: float
    T: float
    B: float
    M: float

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError("asymmetry parameter T must be positive")


@dataclass(frozen=True)
class Moffat:
    """Heavy-tailed bell profile A(1 + ((x-mu)/sigma)^2)^(-beta)."""

    A: float
    mu: float
    sigma: float
    beta: float

    def __post_init__(self):
        if self.sigma == 0:
            raise ValueError("sigma must be nonzero")


FitModel = GeneralizedLogistic | Moffat

MODEL_NAMES = {GeneralizedLogistic: "generalized_logistic", Moffat: "moffat"}
PARAM_NAMES = {GeneralizedLogistic: ("a", "c", "T", "B", "M"),
               Moffat: ("A", "mu", "sigma", "beta")}


@dataclass(frozen=True)
class FitResult:
    model: FitModel
    chi2_per_dof: float
    n_iterations: int
    converged: bool
    residuals: tuple[float, ...]
    chi2_trace: tuple[float, ...]


def _eval_logistic(theta, x):
    a, c, T, B, M = theta
    z = -B * (x - M)
    # log-space denominator avoids overflow; saturates to a / a + c
    zc = np.minimum(z, 690.0)
    w = np.where(z < 690.0,
                 np.log1p(T * np.exp(zc)) / T,
                 (np.log(T) + z) / T)
    return a + c * np.exp(-w)


def _eval_moffat(theta, x):
    A, mu, sigma, beta = theta
    return A * (1.0 + ((x - mu) / sigma) ** 2) ** (-beta)


def _theta_valid(kind, theta):
    if not np.all(np.isfinite(theta)):
        return False
    if kind is GeneralizedLogistic:
        return theta[2] > 0
    return theta[2] != 0


def _eval_kind(kind, theta, x):
    if kind is GeneralizedLogistic:
        return _eval_logistic(theta, x)
    if kind is Moffat:
        return _eval_moffat(theta, x)
    raise TypeError(f"unknown model kind {kind!r}")


def eval_model(model: FitModel, x):
    """Evaluate a fitted model at x (scalar or ndarray)."""
    kind = type(model)
    theta = np.array([getattr(model, name) for name in PARAM_NAMES[kind]])
    return _eval_kind(kind, theta, x)


def model_jacobian(kind, theta, x, step: float = 1e-7,
                   scheme: str = "forward") -> np.ndarray:
    """Finite-difference Jacobian d(model)/d(theta), shape (len(x), len(theta))."""
    theta = np.asarray(theta, dtype=float)
    x = np.asarray(x, dtype=float)
    cols = []
    f0 = _eval_kind(kind, theta, x)
    for j in range(theta.shape[0]):
        h = step * max(abs(theta[j]), 1.0)
        up = theta.copy()
        up[j] += h
        if scheme == "forward":
            cols.append((_eval_kind(kind, up, x) - f0) / h)
        else:
            dn = theta.copy()
            dn[j] -= h
            cols.append((_eval_kind(kind, up, x) - _eval_kind(kind, dn, x))
                        / (2 * h))
    return np.column_stack(cols)


def default_inits(model_kind, data) -> np.ndarray:
    """Data-driven starting parameters for a fit."""
    pts = np.asarray(data, dtype=float)
    if pts.size == 0:
        raise ValueError("data must be nonempty")
    x, y = pts[:, 0], pts[:, 1]
    span = float(x.max() - x.min()) or 1.0
    if model_kind is Moffat:
        return np.array([float(y.max()), float(x[np.argmax(y)]),
                         0.5 * span, 2.0])
    if model_kind is GeneralizedLogistic:
        return np.array([float(y.min()), float(y.max() - y.min()), 1.0,
                         4.0 / span, float(np.median(x))])
    raise TypeError(f"unknown model kind {model_kind!r}")


def _pack_model(kind, theta) -> FitModel:
    theta = [float(v) for v in theta]
    if kind is Moffat:
        theta[2] = abs(theta[2])  # profile is even in sigma; report the width
    return kind(**dict(zip(PARAM_NAMES[kind], theta)))


def fit_least_squares(model_kind, data, init=None,
                      max_iter: int = LM_MAX_ITER) -> FitResult:
    """Levenberg-Marquardt fit of one model to (x, y) pairs.

    Steps solve (J^T J + lambda diag(J^T J)) delta = J^T r and are accepted
    only when chi^2 strictly decreases, so the accepted-chi^2 trace is
    monotone.  Convergence: relative chi^2 decrease below LM_CHI2_RTOL or
    a proposed/accepted step shorter than LM_STEP_TOL.  Exhausting the
    damping range or the iteration cap returns the best iterate with
    ``converged=False``.
    """
    pts = np.asarray(data, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("data must be a sequence of (x, y) pairs")
    x, y = pts[:, 0], pts[:, 1]
    theta = np.asarray(default_inits(model_kind, data) if init is None
                       else init, dtype=float)
    n_params = theta.shape[0]
    if pts.shape[0] <= n_params:
        raise ValueError("need more data points than parameters")
    if not _theta_valid(model_kind, theta):
        raise ValueError("initial parameters violate model constraints")
    if float(y.max() - y.min()) == 0.0:
        warnings.warn("constant data: fit parameters are degenerate",
                      stacklevel=2)

    r = y - _eval_kind(model_kind, theta, x)
    chi2 = float(r @ r)
    trace = [chi2]
    lam = LM_LAMBDA0
    converged = False
    iterations = 0
    diag_floor = 1e-12
    for iterations in range(1, max_iter + 1):
        J = model_jacobian(model_kind, theta, x)
        JtJ = J.T @ J
        grad = J.T @ r
        D = np.diag(np.maximum(np.diag(JtJ), diag_floor))
        try:
            delta = np.linalg.solve(JtJ + lam * D, grad)
        except np.linalg.LinAlgError:
            lam *= LM_GROW
            if lam > LM_LAMBDA_MAX:
                break
            continue
        step_norm = float(np.linalg.norm(delta))
        cand = theta + delta
        if _theta_valid(model_kind, cand):
            r_new = y - _eval_kind(model_kind, cand, x)
            chi2_new = float(r_new @ r_new)
        else:
            chi2_new = np.inf
        if np.isfinite(chi2_new) and chi2_new < chi2:
            rel_drop = (chi2 - chi2_new) / max(chi2, np.finfo(float).tiny)
            theta, r, chi2 = cand, r_new, chi2_new
            trace.append(chi2)
            lam = max(lam / LM_SHRINK, 1e-15)
            if rel_drop < LM_CHI2_RTOL or step_norm < LM_STEP_TOL:
                converged = True
                break
        else:
            if step_norm < LM_STEP_TOL:
                converged = True  # negligible step proposed at high damping
                break
            lam *= LM_GROW
            if lam > LM_LAMBDA_MAX:
                break
    dof = pts.shape[0] - n_params
    return FitResult(model=_pack_model(model_kind, theta),
                     chi2_per_dof=chi2 / dof,
                     n_iterations=iterations,
                     converged=converged,
                     residuals=tuple(float(v) for v in r),
                     chi2_trace=tuple(trace))
