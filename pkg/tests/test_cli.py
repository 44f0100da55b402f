import pytest

from fpwsim import ConfigError, parse_device_config
from fpwsim.cli import main, run
from fpwsim.config import parse_calibration_points, parse_density
from conftest import WAVELENGTH

MINIMAL_CONFIG = """
[layer]
thickness = 1e-6
young_modulus = 1e11
poisson_ratio = 0.3
density = 3000

[geometry]
wavelength = 40e-6
"""

CALIBRATION_FILE = """\
# density frequency
0.787g/cm3 4.94e6
1.0g/cm3   4.75e6
1.2g/cm3   4.59e6
"""


@pytest.fixture
def points_file(tmp_path):
    path = tmp_path / "points.txt"
    path.write_text(CALIBRATION_FILE)
    return str(path)


class TestParseDeviceConfig:
    def test_bundled_reference_device(self):
        result = run(["plate"])
        assert result.exit_status == 0

    def test_bundled_values(self):
        from fpwsim.cli import _bundled

        cfg = parse_device_config(_bundled("reference_device.cfg"))
        assert cfg.geometry.wavelength == pytest.approx(WAVELENGTH)
        assert cfg.geometry.idt_pairs == 20
        assert cfg.geometry.grating_strips == 40
        assert cfg.geometry.overlap == 50.0
        assert cfg.geometry.idt_separation == 10.0
        assert cfg.geometry.grating_gap == pytest.approx(5e-6)
        assert cfg.com_velocity == 2400.0
        assert cfg.overrides == {"mass_per_area": 0.1176}
        assert len(cfg.layers) == 2

    def test_minimal_config_applies_defaults(self):
        cfg = parse_device_config(MINIMAL_CONFIG)
        assert cfg.geometry.idt_pairs == 20
        assert cfg.geometry.grating_gap == pytest.approx(5e-6)
        params = cfg.com_parameters(free_velocity=2400.0)
        assert params.strip_reflectivity == 0.02
        assert params.attenuation == 0.0

    def test_typo_key_names_line(self):
        text = "[geometry]\nwavelenght = 40e-6\n"
        with pytest.raises(ConfigError, match="line 2"):
            parse_device_config(text)

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match=r"line 1.*\[idt\]"):
            parse_device_config("[idt]\npairs = 20\n")

    def test_malformed_number_names_line(self):
        text = "[geometry]\nwavelength = forty\n"
        with pytest.raises(ConfigError, match="line 2"):
            parse_device_config(text)

    def test_missing_wavelength_rejected(self):
        with pytest.raises(ConfigError, match="wavelength"):
            parse_device_config("[geometry]\nidt_pairs = 20\n")

    def test_duplicate_key_rejected(self):
        text = "[geometry]\nwavelength = 40e-6\nwavelength = 30e-6\n"
        with pytest.raises(ConfigError, match="line 3"):
            parse_device_config(text)

    def test_spacing_index_and_gap_conflict(self):
        text = (
            "[geometry]\nwavelength = 40e-6\nspacing_index = 0\n"
            "grating_gap = 5e-6\n"
        )
        with pytest.raises(ConfigError, match="not both"):
            parse_device_config(text)

    def test_incomplete_layer_rejected(self):
        text = "[layer]\nthickness = 1e-6\n[geometry]\nwavelength = 40e-6\n"
        with pytest.raises(ConfigError, match="missing"):
            parse_device_config(text)

    def test_key_outside_section_rejected(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_device_config("wavelength = 40e-6\n")

    def test_layers_stack_in_order(self):
        from fpwsim.cli import _bundled

        cfg = parse_device_config(_bundled("reference_device.cfg"))
        assert [l.name for l in cfg.layers] == ["SiNx", "PZT+LSMO"]


class TestDensityParsing:
    def test_si_plain(self):
        assert parse_density("1000") == 1000.0

    def test_gcm3_suffix(self):
        assert parse_density("1.2g/cm3") == pytest.approx(1200.0)

    def test_points_file(self):
        points = parse_calibration_points(CALIBRATION_FILE)
        assert points[0] == (pytest.approx(787.0), 4.94e6)
        assert len(points) == 3

    def test_points_file_bad_line(self):
        with pytest.raises(ValueError, match="line 1"):
            parse_calibration_points("only_one_field\n")


class TestPlateCommand:
    def test_reference_values_printed(self):
        result = run(["plate"])
        assert result.exit_status == 0
        text = "\n".join(result.summary)
        assert "young_modulus_n_m2: 2.420000000e+11" in text
        assert "poisson_ratio: 2.604347826e-01" in text
        assert "override; computed 1.208000000e-02" in text
        assert "bending_term_n_m: 6.494721385e+03" in text

    def test_single_layer_config(self, tmp_path):
        path = tmp_path / "one.cfg"
        path.write_text(MINIMAL_CONFIG)
        result = run(["--config", str(path), "plate"])
        assert result.exit_status == 0
        text = "\n".join(result.summary)
        assert "young_modulus_n_m2: 1.000000000e+11" in text

    def test_empty_stack_exits_2(self, tmp_path):
        path = tmp_path / "nolayers.cfg"
        path.write_text("[geometry]\nwavelength = 40e-6\n")
        result = run(["--config", str(path), "plate"])
        assert result.exit_status == 2
        assert result.errors

    def test_missing_config_file_exits_2(self):
        result = run(["--config", "/nonexistent.cfg", "plate"])
        assert result.exit_status == 2


class TestDispersionCommand:
    def test_unloaded_reference_frequency(self):
        result = run(["dispersion"])
        assert result.exit_status == 0
        line = next(
            l for l in result.summary if l.startswith("resonant_frequency_hz")
        )
        value = float(line.split(":")[1])
        assert value == pytest.approx(5.876e6, rel=1e-3)

    def test_water_loading(self):
        result = run(["dispersion", "--liquid", "water"])
        line = next(
            l for l in result.summary if l.startswith("phase_velocity_m_s")
        )
        assert float(line.split(":")[1]) == pytest.approx(228.782132555, rel=1e-8)

    def test_unknown_liquid_lists_available(self):
        result = run(["dispersion", "--liquid", "oil"])
        assert result.exit_status == 2
        assert "glycerol" in result.errors[0]
        assert "water" in result.errors[0]

    def test_density_sweep_csv(self, tmp_path):
        out = tmp_path / "sweep.csv"
        result = run(
            [
                "dispersion",
                "--sweep-out",
                str(out),
                "--sweep-densities",
                "800:1200:5",
            ]
        )
        assert result.exit_status == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "density_kg_m3,frequency_hz"
        assert len(lines) == 6


class TestS21Command:
    def test_bulk_sweep_csv_contract(self, tmp_path):
        out = tmp_path / "bulk.csv"
        result = run(["s21", "--bulk", "--out", str(out), "--points", "201"])
        assert result.exit_status == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "f_hz,s21_re,s21_im,s21_db"
        assert len(lines) == 202
        # Every data field in %.9e formatting.
        assert all(len(line.split(",")) == 4 for line in lines[1:])
        peak = next(
            l for l in result.summary if l.startswith("peak_frequency_hz")
        )
        assert float(peak.split(":")[1]) == pytest.approx(60e6, rel=2e-3)

    def test_fpw_sweep_peaks_at_plate_frequency(self, tmp_path):
        out = tmp_path / "fpw.csv"
        result = run(["s21", "--fpw", "--out", str(out), "--points", "801"])
        peak = next(
            l for l in result.summary if l.startswith("peak_frequency_hz")
        )
        assert float(peak.split(":")[1]) == pytest.approx(5.875e6, rel=1e-3)

    def test_byte_identical_reruns(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        run(["s21", "--bulk", "--out", str(out1), "--points", "101"])
        run(["s21", "--bulk", "--out", str(out2), "--points", "101"])
        assert out1.read_bytes() == out2.read_bytes()

    def test_bulk_without_velocity_exits_2(self, tmp_path):
        cfg = tmp_path / "novel.cfg"
        cfg.write_text(MINIMAL_CONFIG)
        out = tmp_path / "x.csv"
        result = run(
            ["--config", str(cfg), "s21", "--bulk", "--out", str(out)]
        )
        assert result.exit_status == 2

    def test_monotone_window_exits_1(self, tmp_path):
        # A window far below the stopband rises monotonically, so no
        # interior peak exists.
        out = tmp_path / "flat.csv"
        result = run(
            [
                "s21",
                "--bulk",
                "--out",
                str(out),
                "--points",
                "51",
                "--f-start",
                "54e6",
                "--f-stop",
                "55e6",
            ]
        )
        assert result.exit_status == 1
        assert out.exists()


class TestFitInvertCommands:
    def test_fit_reference_slope(self, points_file):
        result = run(["fit", "--points", points_file])
        assert result.exit_status == 0
        line = next(
            l for l in result.summary if l.startswith("slope_mhz_per_g_cm3")
        )
        assert float(line.split(":")[1]) == pytest.approx(-0.848, abs=0.002)

    def test_fit_single_point_exits_2(self, tmp_path):
        path = tmp_path / "one.txt"
        path.write_text("1.0g/cm3 4.75e6\n")
        result = run(["fit", "--points", str(path)])
        assert result.exit_status == 2

    def test_invert_at_fit_point(self, points_file):
        result = run(["invert", "--freq", "4.75e6", "--points", points_file])
        assert result.exit_status == 0
        line = next(l for l in result.summary if l.startswith("density_g_cm3"))
        assert float(line.split(":")[1]) == pytest.approx(1.0, abs=0.01)

    def test_invert_out_of_range_warns(self, points_file):
        result = run(["invert", "--freq", "6.5e6", "--points", points_file])
        assert result.exit_status == 0
        assert any("outside the calibrated range" in l for l in result.summary)


class TestMainEntryPoint:
    def test_prints_summary_and_returns_zero(self, capsys):
        status = main(["plate"])
        captured = capsys.readouterr()
        assert status == 0
        assert "young_modulus_n_m2" in captured.out
        assert captured.err == ""

    def test_prints_errors_to_stderr(self, capsys):
        status = main(["dispersion", "--liquid", "oil"])
        captured = capsys.readouterr()
        assert status == 2
        assert "unknown liquid" in captured.err
