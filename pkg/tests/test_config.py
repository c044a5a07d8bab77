import math

import pytest
from numpy.testing import assert_allclose

from fanocavity import ConfigError, Method, Topology, default_params
from fanocavity.config import DEFAULT_G_LIST, load_config, parse_config


class TestDefaults:
    def test_empty_document_is_full_preset(self):
        cfg = parse_config("")
        assert cfg.params == default_params()
        assert cfg.topology is Topology.DOUBLE_MOVABLE
        assert cfg.g_list == DEFAULT_G_LIST
        assert cfg.grid.n_points == 4001
        assert cfg.grid.omega_min_over_Om == 0.98
        assert cfg.method is Method.MATRIX_SOLVE
        assert cfg.prominence == 1e-4
        assert cfg.scale_xbar == 1e11

    def test_comments_and_blanks_ignored(self):
        cfg = parse_config("# a comment\n\n   \n")
        assert cfg.params == default_params()


class TestParsing:
    def test_g_list(self):
        cfg = parse_config("g_over_Om = [0.0, 0.6]\n")
        assert cfg.g_list == (0.0, 0.6)

    def test_hz_conversions(self):
        cfg = parse_config("kappa_Hz = 10e6\nOmega_m_Hz = 50e6\n"
                           "gamma_Hz = 30e3\nG1_Hz_per_nm = 10e9\n")
        assert_allclose(cfg.params.kappa, 2 * math.pi * 10e6, rtol=1e-14)
        assert_allclose(cfg.params.Omega1, 2 * math.pi * 50e6, rtol=1e-14)
        assert_allclose(cfg.params.gamma1, 2 * math.pi * 30e3, rtol=1e-14)
        assert_allclose(cfg.params.G1, 2 * math.pi * 1.0e19, rtol=1e-14)

    def test_detunings_scale_with_mechanical_frequency(self):
        cfg = parse_config("Omega_m_Hz = 40e6\nDelta1_over_Om = -1\n"
                           "Delta2_over_Om = 0.5\n")
        assert_allclose(cfg.params.Delta1, -2 * math.pi * 40e6, rtol=1e-14)
        assert_allclose(cfg.params.Delta2, math.pi * 40e6, rtol=1e-14)

    def test_topology_and_grid(self):
        cfg = parse_config("topology = FixedEnds\ngrid_min = 0.9\n"
                           "grid_max = 1.1\ngrid_points = 101\n")
        assert cfg.topology is Topology.FIXED_ENDS
        assert cfg.grid.omega_min_over_Om == 0.9
        assert cfg.grid.n_points == 101


class TestErrors:
    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="unknown key 'kappa'"):
            parse_config("kappa = 1e6\n")

    def test_negative_kappa_named(self):
        with pytest.raises(ConfigError, match="kappa_Hz"):
            parse_config("kappa_Hz = -1\n")

    def test_malformed_line_located(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config("eta = 0.5\nnot a pair\n")

    def test_non_numeric_value(self):
        with pytest.raises(ConfigError, match="eta"):
            parse_config("eta = strong\n")

    def test_bad_topology(self):
        with pytest.raises(ConfigError, match="topology"):
            parse_config("topology = Clamped\n")

    def test_bad_grid_ordering(self):
        with pytest.raises(ConfigError, match="omega_min"):
            parse_config("grid_min = 1.1\ngrid_max = 0.9\n")

    def test_list_syntax_required(self):
        with pytest.raises(ConfigError, match="g_over_Om"):
            parse_config("g_over_Om = 0.4\n")

    def test_negative_g_rejected(self):
        with pytest.raises(ConfigError, match="g_over_Om"):
            parse_config("g_over_Om = [-0.1]\n")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config("eta = 0.5\neta = 0.4\n")

    def test_eta_out_of_range(self):
        with pytest.raises(ConfigError, match="eta"):
            parse_config("eta = 1.5\n")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "nope.cfg")
