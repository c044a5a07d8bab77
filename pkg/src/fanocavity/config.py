"""Flat key/value run configuration.

The boundary convention is SI-with-Hz: frequency-like keys take ordinary
frequencies in Hz (``kappa_Hz = 15e6``) and the loader multiplies by 2*pi;
pull rates are given in Hz per nm.  Detunings are given in units of the
mechanical frequency.  Unknown keys are rejected by name; missing keys
take the reference-device defaults.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import ConfigError
from .lineshape import DEFAULT_PROMINENCE, DEFAULT_XBAR_SCALE
from .params import PhysicalParams, Topology, default_params
from .spectrum import GridSpec, Method

DEFAULT_G_LIST = (0.0, 0.1, 0.2, 0.3, 0.4, 0.6)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved inputs of one CLI run; deterministic, no seeds."""

    params: PhysicalParams          # with g = 0; sweeps set g per run
    topology: Topology
    grid: GridSpec
    g_list: tuple[float, ...]       # tunneling rates in units of Omega1
    method: Method = Method.MATRIX_SOLVE
    output_dir: Path = Path("out")
    emit_svg: bool = False
    prominence: float = DEFAULT_PROMINENCE
    scale_xbar: float = DEFAULT_XBAR_SCALE

    def with_overrides(self, **changes) -> "RunConfig":
        return replace(self, **changes)


_SCALAR_KEYS = {
    "m1_kg", "m2_kg", "Omega_m_Hz", "gamma_Hz", "G1_Hz_per_nm",
    "G2_Hz_per_nm", "kappa_Hz", "eta", "P_c_W", "P_p_W", "lambda_c_m",
    "Delta1_over_Om", "Delta2_over_Om", "grid_min", "grid_max",
    "grid_points", "prominence", "scale_xbar",
}
_LIST_KEYS = {"g_over_Om"}
_WORD_KEYS = {"topology"}
KNOWN_KEYS = _SCALAR_KEYS | _LIST_KEYS | _WORD_KEYS

_POSITIVE = {"m1_kg", "m2_kg", "Omega_m_Hz", "kappa_Hz", "lambda_c_m"}
_NONNEGATIVE = {"gamma_Hz", "P_c_W", "P_p_W", "prominence"}


def _parse_number(token: str, key: str, line_no: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ConfigError(
            f"line {line_no}: value for '{key}' is not a number: {token!r}"
        ) from None


def _parse_value(key: str, raw: str, line_no: int):
    raw = raw.strip()
    if key in _LIST_KEYS:
        if not (raw.startswith("[") and raw.endswith("]")):
            raise ConfigError(
                f"line {line_no}: '{key}' takes a bracketed list, e.g. "
                "[0.0, 0.4]")
        inner = raw[1:-1].strip()
        if not inner:
            raise ConfigError(f"line {line_no}: '{key}' list is empty")
        return tuple(_parse_number(tok.strip(), key, line_no)
                     for tok in inner.split(","))
    if key in _WORD_KEYS:
        return raw
    return _parse_number(raw, key, line_no)


def _validate_scalar(key: str, value: float, line_no: int):
    if key in _POSITIVE and value <= 0:
        raise ConfigError(f"line {line_no}: '{key}' must be > 0, got {value:g}")
    if key in _NONNEGATIVE and value < 0:
        raise ConfigError(f"line {line_no}: '{key}' must be >= 0, got {value:g}")
    if key == "eta" and not 0 < value <= 1:
        raise ConfigError(f"line {line_no}: 'eta' must be in (0, 1], got {value:g}")
    if key == "grid_points" and (value < 2 or value != int(value)):
        raise ConfigError(
            f"line {line_no}: 'grid_points' must be an integer >= 2, got {value:g}")


def parse_config(text: str) -> RunConfig:
    """Parse a flat key/value document into a RunConfig.

    An empty document yields the full reference preset.  Raises
    ConfigError naming the offending key and line for malformed lines,
    unknown keys and invalid values.
    """
    values: dict = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {line_no}: expected 'key = value', got "
                              f"{stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {line_no}: unknown key '{key}'")
        if key in values:
            raise ConfigError(f"line {line_no}: duplicate key '{key}'")
        value = _parse_value(key, raw, line_no)
        if key in _SCALAR_KEYS:
            _validate_scalar(key, value, line_no)
        if key in _LIST_KEYS and any(v < 0 for v in value):
            raise ConfigError(
                f"line {line_no}: '{key}' entries must be >= 0")
        values[key] = (value, line_no)

    def take(key, default):
        return values.pop(key, (default, 0))[0]

    Omega_m = 2 * math.pi * take("Omega_m_Hz", 51.8e6)
    gamma = 2 * math.pi * take("gamma_Hz", 41e3)
    base = default_params()
    try:
        params = PhysicalParams(
            m1=take("m1_kg", base.m1),
            m2=take("m2_kg", base.m2),
            Omega1=Omega_m,
            Omega2=Omega_m,
            gamma1=gamma,
            gamma2=gamma,
            G1=2 * math.pi * take("G1_Hz_per_nm", 13e9) * 1e9,
            G2=2 * math.pi * take("G2_Hz_per_nm", 13e9) * 1e9,
            kappa=2 * math.pi * take("kappa_Hz", 15e6),
            eta=take("eta", base.eta),
            g=0.0,
            Delta1=take("Delta1_over_Om", -1.0) * Omega_m,
            Delta2=take("Delta2_over_Om", -1.0) * Omega_m,
            P_c=take("P_c_W", base.P_c),
            P_p=take("P_p_W", base.P_p),
            lambda_c=take("lambda_c_m", base.lambda_c),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    topo_raw, topo_line = values.pop("topology", ("DoubleMovable", 0))
    try:
        topology = Topology(topo_raw)
    except ValueError:
        choices = ", ".join(t.value for t in Topology)
        raise ConfigError(
            f"line {topo_line}: 'topology' must be one of {choices}, got "
            f"{topo_raw!r}") from None

    gmin, gmin_line = values.pop("grid_min", (0.98, 0))
    gmax, gmax_line = values.pop("grid_max", (1.02, 0))
    npts = int(take("grid_points", 4001))
    try:
        grid = GridSpec(omega_min_over_Om=gmin, omega_max_over_Om=gmax,
                        n_points=npts)
    except ValueError as exc:
        raise ConfigError(
            f"line {max(gmin_line, gmax_line)}: {exc}") from exc

    g_list = tuple(take("g_over_Om", DEFAULT_G_LIST))
    prominence = take("prominence", DEFAULT_PROMINENCE)
    scale_xbar = take("scale_xbar", DEFAULT_XBAR_SCALE)
    return RunConfig(params=params, topology=topology, grid=grid,
                     g_list=g_list, prominence=prominence,
                     scale_xbar=scale_xbar)


def load_config(path: str | Path | None) -> RunConfig:
    """Read a config file, or return the full default when path is None."""
    if path is None:
        return parse_config("")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
