"""Acceptance suite: one test per criterion, run with ``pytest -v -s``.

Each test prints a single pass line on success; a failing criterion shows
the offending clause in its assertion message.
"""

import dataclasses
import math
import time
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from fanocavity import (GeneralizedLogistic, GridSpec, Moffat, SolveOptions,
                        Topology, closed_form_double_fano_Tb,
                        closed_form_single_fano_Tb, compute_spectrum,
                        default_params, find_dips, find_peaks,
                        fit_least_squares, intensity_table, reflection_point,
                        separation_vs_g, solve_sidebands, solve_steady_state,
                        spearman_rank_correlation, sweep_tunneling)
from fanocavity.cli import FIG5_G_MAX, FIG5_G_MIN, FIG5_GRID, FIG5_N_G, main
from fanocavity.sidebands import solve_reflection_grid

GOLDEN = Path(__file__).parent / "golden"


def _passed(n, label):
    print(f"[acceptance] criterion {n:2d} ({label}): PASS")


def _random_params(rng, equal_G):
    loguni = lambda lo, hi: 10.0 ** rng.uniform(lo, hi)
    Om = 2 * math.pi * 51.8e6 * loguni(-0.2, 0.2)
    G1 = 2 * math.pi * 1.3e19 * loguni(-0.3, 0.3)
    G2 = G1 if equal_G else 2 * math.pi * 1.3e19 * loguni(-0.3, 0.3)
    return default_params(
        m1=2e-11 * loguni(-0.5, 0.5),
        m2=2e-11 * loguni(-0.5, 0.5),
        Omega1=Om,
        Omega2=Om * (1.0 if equal_G else loguni(-0.02, 0.02)),
        gamma1=2 * math.pi * 41e3 * loguni(-0.5, 0.5),
        gamma2=2 * math.pi * 41e3 * loguni(-0.5, 0.5),
        G1=G1,
        G2=G2,
        kappa=2 * math.pi * 15e6 * loguni(-0.2, 0.2),
        eta=rng.uniform(0.2, 0.9),
        g=rng.uniform(0.05, 0.7) * Om,
        Delta1=-Om * (1 + rng.uniform(-0.1, 0.1)),
        Delta2=-Om * (1 + rng.uniform(-0.1, 0.1)),
        P_c=1e-3 * loguni(-0.5, 0.5),
    )


def test_criterion_01_oracle_equivalence():
    """Closed forms match the dense solve to 1e-8 on randomized devices."""
    started = time.perf_counter()
    rng = np.random.default_rng(20260811)
    grid = np.linspace(0.98, 1.02, 401)
    # a few draws land in the strong-feedback regime where the default
    # damping two-cycles; the exposed solver options handle them
    opts = SolveOptions(damping=0.2, max_iter=40000)
    for trial in range(100):
        p = _random_params(rng, equal_G=True)
        s = solve_steady_state(p, Topology.FIXED_ENDS, opts)
        omegas = grid * p.Omega1
        cpb, gaps = solve_reflection_grid(p, Topology.FIXED_ENDS, s, omegas)
        assert gaps == []
        tb_matrix = np.abs(cpb) ** 2
        tb_closed = closed_form_single_fano_Tb(p, s, omegas)
        err = np.abs(tb_closed - tb_matrix) / np.maximum(1.0, tb_matrix)
        assert np.max(err) <= 1e-8, \
            f"single-channel trial {trial}: max rel err {np.max(err):.3e}"
    for trial in range(100):
        p = _random_params(rng, equal_G=False)
        s = solve_steady_state(p, Topology.DOUBLE_MOVABLE, opts)
        s = dataclasses.replace(s, DeltaBar2=s.DeltaBar1)
        omegas = grid * p.Omega1
        cpb, gaps = solve_reflection_grid(p, Topology.DOUBLE_MOVABLE, s,
                                          omegas)
        assert gaps == []
        tb_matrix = np.abs(cpb) ** 2
        tb_closed = closed_form_double_fano_Tb(p, s, omegas)
        err = np.abs(tb_closed - tb_matrix) / np.maximum(1.0, tb_matrix)
        assert np.max(err) <= 1e-8, \
            f"two-channel trial {trial}: max rel err {np.max(err):.3e}"
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0, f"oracle sweep took {elapsed:.1f} s"
    _passed(1, "oracle equivalence")


def test_criterion_02_steady_back_substitution():
    """Residual <= 1e-10 and b*Theta2 = i g a to 1e-12 across the g sweep."""
    p0 = default_params()
    for topology in Topology:
        for g_over in np.arange(0.0, 1.01, 0.1):
            p = p0.with_g_over_Om(round(float(g_over), 10))
            s = solve_steady_state(p, topology)
            assert s.residual <= 1e-10, \
                f"{topology} g={g_over:.1f}: residual {s.residual:.2e}"
            Theta2 = 1j * s.DeltaBar2 - p.kappa / 2
            lhs = s.b_bar * Theta2
            rhs = 1j * p.g * s.a_bar
            assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs), 1e-300)
    _passed(2, "steady-state back-substitution")


def test_criterion_03_intensity_identity():
    """Photon ratio identity to 1e-12; |b|^2 strictly increasing in g."""
    p0 = default_params()
    g_list = [round(float(g), 10) for g in np.arange(0.0, 1.01, 0.1)]
    rows = intensity_table(p0, Topology.DOUBLE_MOVABLE, g_list)
    for g_over, row in zip(g_list, rows):
        p = p0.with_g_over_Om(g_over)
        s = solve_steady_state(p, Topology.DOUBLE_MOVABLE)
        expect = p.g ** 2 / (s.DeltaBar2 ** 2 + p.kappa ** 2 / 4)
        if g_over == 0.0:
            assert row.ratio == 0.0
        else:
            assert abs(row.ratio - expect) <= 1e-12 * expect, \
                f"g={g_over}: ratio {row.ratio} vs identity {expect}"
    n_b = [r.n_b for r in rows[1:]]  # g in [0.1, 1.0]
    assert all(b > a for a, b in zip(n_b, n_b[1:])), \
        "|b|^2 not strictly increasing on g in [0.1, 1.0]"
    _passed(3, "intensity identity")


def test_criterion_04_omit_limit():
    """g=0: topologies agree pointwise; one interference feature at center."""
    p = default_params()
    fe = compute_spectrum(p, Topology.FIXED_ENDS)
    dm = compute_spectrum(p, Topology.DOUBLE_MOVABLE)
    diff = np.max(np.abs(fe.values() - dm.values()))
    assert diff < 1e-10, f"topology mismatch at g=0: {diff:.2e}"
    features = find_dips(dm) + find_peaks(dm)
    central = [f for f in features if abs(f.position_over_Om - 1.0) < 0.002]
    assert len(central) == 1, \
        (f"expected exactly one extremal structure within |x-1|<0.002, "
         f"found {[(f.position_over_Om, f.depth) for f in central]}")
    _passed(4, "transparency limit")


def test_criterion_05_double_fano_emergence():
    """Dip counts across the tunneling transition (movable end mirrors)."""
    p = default_params()
    spectra, failures = sweep_tunneling(p, Topology.DOUBLE_MOVABLE,
                                        GridSpec(), [0.2, 0.4, 0.6])
    assert failures == []
    counts = {s.g_over_Om: len(find_dips(s)) for s in spectra}
    assert counts[0.4] == 2, f"expected 2 dips at g=0.4, got {counts[0.4]}"
    assert counts[0.6] == 2, f"expected 2 dips at g=0.6, got {counts[0.6]}"
    assert counts[0.2] == 1, \
        (f"expected 1 dip at g=0.2, got {counts[0.2]} (the computed "
         f"spectrum shows a transparency peak with no interior minimum in "
         f"[0.98, 1.02]; the first dip appears near g=0.21)")
    _passed(5, "double-Fano emergence")


@pytest.fixture(scope="module")
def separation_curve():
    return separation_vs_g(default_params(), FIG5_GRID, FIG5_G_MIN,
                           FIG5_G_MAX, FIG5_N_G)


def test_criterion_06_separation_curve(separation_curve):
    """Shape of separation vs g and its mimicry of the x1 displacement."""
    rows = separation_curve.rows
    assert len(rows) >= 25
    assert all(r.separation_over_Om is not None for r in rows), \
        "separation absent at some sampled g"
    g = np.array([r.g_over_Om for r in rows])
    sep = np.array([r.separation_over_Om for r in rows])
    x1 = np.array([r.x1_bar_scaled for r in rows])
    mid = (g >= 0.6 - 1e-12) & (g <= 0.9 + 1e-12)
    drops = np.diff(sep[mid])
    assert drops.min() >= -0.02 * sep.max(), \
        f"separation decreases by {-drops.min():.2e} on [0.6, 0.9]"
    g_max = g[int(np.argmax(sep))]
    assert 0.9 <= g_max < 1.0, f"separation maximum at g={g_max}"
    assert sep[-1] < sep.max(), "separation at g=1 not below the maximum"
    rho = spearman_rank_correlation(sep, x1)
    assert rho > 0.8, \
        (f"rank correlation between separation and x1 is {rho:.3f}; the "
         f"self-consistent x1 collapses (and turns negative) as |b|^2 "
         f"approaches |a|^2 near g=Omega_m while the separation keeps "
         f"growing to g~0.975")
    _passed(6, "separation curve")


def test_criterion_07_fit_ordering(separation_curve):
    """Both separation fits succeed; heavy-tailed profile fits better."""
    data = [(r.g_over_Om, r.separation_over_Om)
            for r in separation_curve.rows if r.separation_over_Om is not None]
    logistic = fit_least_squares(GeneralizedLogistic, data)
    moffat = fit_least_squares(Moffat, data)
    assert moffat.chi2_per_dof < 1e-2, \
        f"moffat chi2/dof {moffat.chi2_per_dof:.3e}"
    assert logistic.chi2_per_dof < 1e-2, \
        f"logistic chi2/dof {logistic.chi2_per_dof:.3e}"
    assert moffat.chi2_per_dof <= logistic.chi2_per_dof, \
        (f"moffat chi2/dof = {moffat.chi2_per_dof:.3e} exceeds logistic "
         f"chi2/dof = {logistic.chi2_per_dof:.3e} on the measured curve: "
         f"the five-parameter sigmoid tracks the monotone rise better than "
         f"the four-parameter bell at the global optimum of each")
    _passed(7, "fit ordering")


def test_criterion_08_fit_recovery():
    """100/100 parameter recovery from +-20% perturbed initial guesses."""
    rng = np.random.default_rng(7321)
    x = np.linspace(0.0, 1.6, 50)

    truth_m = np.array([1.0, 0.8, 0.25, 2.0])
    y = truth_m[0] * (1 + ((x - truth_m[1]) / truth_m[2]) ** 2) \
        ** (-truth_m[3])
    data = np.column_stack([x, y])
    for trial in range(100):
        init = truth_m * (1 + rng.uniform(-0.2, 0.2, 4))
        res = fit_least_squares(Moffat, data, init)
        got = np.array([res.model.A, res.model.mu, res.model.sigma,
                        res.model.beta])
        rel = np.max(np.abs(got - truth_m) / truth_m)
        assert rel < 1e-6 and res.chi2_per_dof < 1e-20, \
            f"moffat trial {trial}: rel err {rel:.2e}"

    truth_l = np.array([0.05, 1.0, 1.5, 8.0, 0.8])
    y = truth_l[0] + truth_l[1] / (1 + truth_l[2] * np.exp(
        -truth_l[3] * (x - truth_l[4]))) ** (1 / truth_l[2])
    data = np.column_stack([x, y])
    for trial in range(100):
        init = truth_l * (1 + rng.uniform(-0.2, 0.2, 5))
        res = fit_least_squares(GeneralizedLogistic, data, init)
        got = np.array([res.model.a, res.model.c, res.model.T, res.model.B,
                        res.model.M])
        rel = np.max(np.abs(got - truth_l) / truth_l)
        assert rel < 1e-6 and res.chi2_per_dof < 1e-20, \
            f"logistic trial {trial}: rel err {rel:.2e}"
    _passed(8, "fit recovery")


def test_criterion_09_linear_response_invariance():
    """T_b independent of probe strength; far-detuned probe reflects."""
    p = default_params().with_g_over_Om(0.4)
    s = solve_steady_state(p, Topology.DOUBLE_MOVABLE)
    omegas = np.linspace(0.98, 1.02, 101) * p.Omega1
    tb1 = np.abs(solve_reflection_grid(p, Topology.DOUBLE_MOVABLE, s,
                                       omegas)[0]) ** 2
    tb10 = np.abs(solve_reflection_grid(p, Topology.DOUBLE_MOVABLE, s,
                                        omegas, eps_p=10 * p.eps_p)[0]) ** 2
    assert np.max(np.abs(tb1 - tb10)) <= 1e-12, \
        f"T_b shifted by {np.max(np.abs(tb1 - tb10)):.2e} under 10x probe"
    p0 = default_params()
    s0 = solve_steady_state(p0, Topology.DOUBLE_MOVABLE)
    sol = solve_sidebands(p0, Topology.DOUBLE_MOVABLE, s0, 5 * p0.Omega1)
    tb_far = reflection_point(p0, sol, p0.eps_p).T_b
    assert abs(tb_far - 1.0) < 1e-2, f"far-detuned T_b = {tb_far}"
    _passed(9, "linear-response invariance")


def test_criterion_10_determinism_and_golden_files(tmp_path):
    """Byte-identical repeated runs; CSV headers match the golden files."""
    runner = CliRunner()
    cfg = tmp_path / "run.cfg"
    cfg.write_text("grid_points = 401\n")
    produced = {}
    for name in ("fig3", "fig4", "fig5", "fig7"):
        outs = []
        for run in ("a", "b"):
            out = tmp_path / f"{name}_{run}"
            result = runner.invoke(main, [name, "--config", str(cfg),
                                          "--out", str(out)])
            assert result.exit_code == 0, f"{name}: {result.output}"
            outs.append(out)
        csvs = sorted(path.name for path in outs[0].glob("*.csv"))
        assert csvs, f"{name} produced no CSV output"
        for fname in csvs:
            b0 = (outs[0] / fname).read_bytes()
            b1 = (outs[1] / fname).read_bytes()
            assert b0 == b1, f"{name}/{fname} differs between runs"
        produced[name] = outs[0]

    def header_of(path):
        return path.read_text().splitlines()[0]

    def golden(name):
        return (GOLDEN / name).read_text().strip()

    assert header_of(next(produced["fig3"].glob("fig3_g*.csv"))) == \
        golden("spectrum_header.txt")
    assert header_of(next(produced["fig4"].glob("fig4_g*.csv"))) == \
        golden("spectrum_header.txt")
    assert header_of(produced["fig5"] / "fig5.csv") == golden("fig5_header.txt")
    assert header_of(produced["fig5"] / "fig5_fits.csv") == \
        golden("fig5_fits_header.txt")
    assert header_of(produced["fig7"] / "fig7.csv") == golden("fig7_header.txt")
    _passed(10, "determinism and golden files")
