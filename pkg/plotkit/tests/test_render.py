"""Golden, determinism, and consistency tests for the diagram renderer."""

import pathlib

import pytest

from plotkit import (
    DiagramSpec,
    read_trajectory,
    region_of,
    render,
    render_svg,
    verify_regions,
)
from plotkit.cli import main

DATA = pathlib.Path(__file__).parent / "data"
GOLDEN = pathlib.Path(__file__).parent / "golden"
BUNDLED = ("damping", "two_phase")


class TestReadTrajectory:
    def test_reads_bundled_files(self):
        for name in BUNDLED:
            rows = read_trajectory(str(DATA / f"{name}.csv"))
            assert len(rows) > 0
            assert all(r.region in ("CP", "P_not_CP", "NP") for r in rows)

    def test_header_only_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("t,eps,mu,delta,kappa,region\n")
        with pytest.raises(ValueError, match="no data rows"):
            read_trajectory(str(path))

    def test_wrong_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError, match="header"):
            read_trajectory(str(path))

    def test_unknown_region_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,eps,mu,delta,kappa,region\n0.1,0,1,1,2,XX\n")
        with pytest.raises(ValueError, match="region"):
            read_trajectory(str(path))


class TestRegionConsistency:
    def test_region_formula_examples(self):
        assert region_of(1.0, 2.0) == "CP"
        assert region_of(2.0, 1.0) == "P_not_CP"
        assert region_of(-1.0, 0.5) == "NP"

    @pytest.mark.parametrize("name", BUNDLED)
    def test_bundled_rows_match_their_labels(self, name):
        """Every CSV row's (eps, mu) falls in the region its label names."""
        rows = read_trajectory(str(DATA / f"{name}.csv"))
        assert verify_regions(rows) == []


class TestGoldenSvg:
    @pytest.mark.parametrize("name", BUNDLED)
    def test_byte_identical_to_golden(self, name, tmp_path):
        out = tmp_path / f"{name}.svg"
        render(str(DATA / f"{name}.csv"), str(out))
        assert out.read_bytes() == (GOLDEN / f"{name}.svg").read_bytes()

    def test_rendering_twice_is_deterministic(self):
        rows = read_trajectory(str(DATA / "two_phase.csv"))
        assert render_svg(rows) == render_svg(rows)

    def test_damping_renders_single_marker(self):
        """A constant-rate trajectory collapses to one marker on the border."""
        rows = read_trajectory(str(DATA / "damping.csv"))
        svg = render_svg(rows)
        assert svg.count("<circle") == 1
        assert "<polyline" not in svg

    def test_two_phase_renders_jump(self):
        """The two-phase path appears as a segment crossing the boundary."""
        rows = read_trajectory(str(DATA / "two_phase.csv"))
        svg = render_svg(rows)
        assert svg.count("<polyline") == 2


class TestCli:
    def test_render_to_svg(self, tmp_path):
        out = tmp_path / "diagram.svg"
        code = main(["--in", str(DATA / "two_phase.csv"), "--out", str(out)])
        assert code == 0
        assert out.read_text().startswith("<?xml")

    def test_png_output(self, tmp_path):
        out = tmp_path / "diagram.png"
        code = main(["--in", str(DATA / "two_phase.csv"), "--out", str(out),
                     "--png"])
        assert code == 0
        assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_malformed_csv_exits_1(self, tmp_path, capsys):
        path = tmp_path / "empty.csv"
        path.write_text("t,eps,mu,delta,kappa,region\n")
        out = tmp_path / "diagram.svg"
        assert main(["--in", str(path), "--out", str(out)]) == 1
        assert "error" in capsys.readouterr().err

    def test_missing_file_exits_1(self, tmp_path, capsys):
        out = tmp_path / "diagram.svg"
        assert main(["--in", str(tmp_path / "nope.csv"), "--out", str(out)]) == 1
        capsys.readouterr()


class TestSpecOverrides:
    def test_custom_canvas_size(self):
        rows = read_trajectory(str(DATA / "two_phase.csv"))
        svg = render_svg(rows, DiagramSpec(width=400, height=300))
        assert 'width="400"' in svg and 'height="300"' in svg
