import pytest

from becflow.config import ConfigError, parse_config, serialize_config

MINIMAL = "n = 2\nalpha = 6.5\nbeta = 0.5\nkappa = 0.4\nlength = 1\n"

PHYSICAL_CONCENTRATION = MINIMAL + (
    "initial.kind = concentration\n"
    "initial.k = 8\n"
)


class TestParsing:
    def test_minimal_document_fills_defaults(self):
        cfg = parse_config(MINIMAL)
        p = cfg.parameters
        assert (p.n, p.alpha, p.beta, p.kappa) == (2.0, 6.5, 0.5, 0.4)
        assert p.epsilon == 1e-3
        assert p.gamma == 0.0  # midpoint of the window (5-alpha+beta, 1) = (-1, 1)
        assert cfg.grid_cells == 256 and cfg.grading_exponent == 2.0
        assert cfg.initial.kind == "constant"
        assert cfg.dt_min == pytest.approx(1e-12 * cfg.t_end)
        assert cfg.mode == "single"
        assert cfg.time_scheme == "euler"

    def test_unknown_key_is_fatal_and_named(self):
        with pytest.raises(ConfigError, match="alhpa"):
            parse_config(MINIMAL + "alhpa = 3\n")

    def test_error_carries_line_number(self):
        with pytest.raises(ConfigError, match="line 6"):
            parse_config(MINIMAL + "alhpa = 3\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config(MINIMAL + "n = 3\n")

    def test_missing_equals_rejected_with_position(self):
        with pytest.raises(ConfigError, match="key = value"):
            parse_config(MINIMAL + "just some text\n")

    def test_unparseable_value_rejected(self):
        with pytest.raises(ConfigError, match="grid.cells"):
            parse_config(MINIMAL + "grid.cells = many\n")

    def test_comments_and_blank_lines_ignored(self):
        cfg = parse_config("# header\n\n" + MINIMAL + "epsilon = 1e-2  # override\n")
        assert cfg.parameters.epsilon == 1e-2

    def test_missing_required_key(self):
        with pytest.raises(ConfigError, match="kappa"):
            parse_config("n = 2\nalpha = 6.5\nbeta = 0.5\nlength = 1\n")

    def test_physical_concentration_is_blowup_admissible(self):
        cfg = parse_config(PHYSICAL_CONCENTRATION)
        assert cfg.initial.kind == "concentration"
        # default theta resolves to the midpoint of (beta+1-kappa, beta+1)
        assert cfg.initial.theta == pytest.approx(1.3)

    def test_inadmissible_parameters_listed(self):
        bad = "n = 1\nalpha = 6.5\nbeta = 0.5\nkappa = 0.4\nlength = 1\n"
        with pytest.raises(ConfigError, match="admissibility"):
            parse_config(bad)

    def test_blowup_window_enforced_for_sweeps(self):
        text = MINIMAL.replace("alpha = 6.5", "alpha = 5.9") + "mode = k_sweep\n"
        with pytest.raises(ConfigError, match="alpha"):
            parse_config(text)
        # but a plain single run only needs the existence window
        parse_config(MINIMAL.replace("alpha = 5.9", "alpha = 6.5"))

    def test_check_flag_skips_admissibility(self):
        bad = "n = 1\nalpha = 6.5\nbeta = 0.5\nkappa = 0.4\nlength = 1\n"
        cfg = parse_config(bad, check=False)
        assert cfg.parameters.n == 1.0

    def test_invalid_scheme_and_mode(self):
        with pytest.raises(ConfigError, match="scheme"):
            parse_config(MINIMAL + "time.scheme = rk4\n")
        with pytest.raises(ConfigError, match="mode"):
            parse_config(MINIMAL + "mode = batch\n")

    def test_lists_parse(self):
        cfg = parse_config(MINIMAL + "eps_study.eps_list = 1e-2,1e-3\nk_sweep.k_list = 2,4\n")
        assert cfg.eps_list == (1e-2, 1e-3)
        assert cfg.k_list == (2, 4)


class TestSerialization:
    def test_round_trip_is_byte_identical(self):
        cfg = parse_config(PHYSICAL_CONCENTRATION + "epsilon = 0.0123456789012345\n")
        echo = serialize_config(cfg)
        again = serialize_config(parse_config(echo))
        assert echo == again

    def test_floats_round_trip_exactly(self):
        # 17 significant digits recover the exact double
        value = 0.1 + 0.2  # not representable prettily
        cfg = parse_config(MINIMAL + f"time.t_end = {value!r}\n")
        cfg2 = parse_config(serialize_config(cfg))
        assert cfg2.t_end == value

    def test_all_profile_kinds_serialize(self, tmp_path):
        table = tmp_path / "t.txt"
        table.write_text("0 1\n0.5 1\n1 1\n")
        docs = [
            MINIMAL + "initial.kind = bump\ninitial.baseline = 0.1\n",
            PHYSICAL_CONCENTRATION,
            MINIMAL + f"initial.table = {table}\ninitial.kind = custom_table\n",
        ]
        for doc in docs:
            echo = serialize_config(parse_config(doc))
            assert serialize_config(parse_config(echo)) == echo
