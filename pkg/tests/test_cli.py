import json

import pytest

from quivergauge.cli import run

from conftest import REPO

TRIANGLE = str(REPO / "jobs" / "triangle.json")
TWO_SITE = str(REPO / "jobs" / "two_site.json")


class TestValidate:
    def test_two_site(self, capsys):
        assert run(["validate", TWO_SITE]) == 0
        out = capsys.readouterr().out
        assert "N=16" in out
        assert "U(3) (mult 4) x U(2) (mult 2)" in out
        assert "U(8) (mult 2)" in out

    def test_builtin(self, capsys):
        assert run(["validate", "builtin:triangle"]) == 0
        assert "N=4" in capsys.readouterr().out

    def test_malformed_job_is_domain_error(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{")
        assert run(["validate", str(p)]) == 1
        assert "error:" in capsys.readouterr().err


class TestExpand:
    def test_two_site_table(self, tmp_path):
        out = tmp_path / "table.json"
        assert run(["expand", TWO_SITE, "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        entries = {e["word"]: e["coeff"] for e in data["entries"]}
        assert entries["e+ ow+ e- ov+"] == "4"  # canonical rotation of ov+ e+ ow+ e-
        assert entries["ov+ ov+ ov+ ov+"] == "1"
        assert data["constant_coeff"] == "30"


class TestLoopeq:
    def test_finite_mode(self, tmp_path):
        out = tmp_path / "eq.json"
        code = run(
            ["loopeq", TRIANGLE, "--loop", "e1+ e2+ e3+", "--root", "e1", "--out", str(out)]
        )
        assert code == 0
        data = json.loads(out.read_text())
        assert data["mode"] == "finite"
        assert data["lhs"] == [
            {"coefficient": 1, "words": ["<const>", "e1+ e2+ e3+"]}
        ]
        coeffs = {(e["plaquette"], e["word"]): e["coefficient"] for e in data["rhs"]}
        assert coeffs[("e1+ e2+ e3+", "e1+ e2+ e3+ e1+ e2+ e3+")] == "1/5"
        assert coeffs[("e1- e3- e2-", "<const>")] == "-1/5"

    def test_large_n_factorization(self, tmp_path):
        out = tmp_path / "eq.json"
        code = run(
            ["loopeq", TRIANGLE, "--loop", "e1+ e2+ e3+ e1+ e2+ e3+",
             "--root", "e1", "--large-n", "--out", str(out)]
        )
        assert code == 0
        data = json.loads(out.read_text())
        fact = data["factorized"]
        assert fact["generator"] == "e1+ e2+ e3+"
        assert sorted((t["i"], t["j"]) for t in fact["lhs"]) == [(0, 2), (1, 1)]
        assert sorted(t["k"] for t in fact["rhs"]) == [1, 3]

    def test_self_loop_root_is_domain_error(self, capsys):
        assert run(["loopeq", TWO_SITE, "--loop", "ov+", "--root", "ov"]) == 1
        assert "self-loop" in capsys.readouterr().err


class TestBootstrap:
    def test_small_scan(self, tmp_path, capsys):
        out = tmp_path / "scan.csv"
        svg = tmp_path / "scan.svg"
        code = run(
            ["bootstrap", "builtin:triangle", "--max-order", "2",
             "--xres", "12", "--yres", "13", "--out", str(out), "--svg", str(svg)]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "x,y,max_feasible_order,first_failing_order"
        assert len(lines) == 1 + 12 * 13
        # order-2 feasibility is exactly the |y| <= 1 stripe
        for line in lines[1:]:
            x, y, mo, ff = line.split(",")
            assert (int(mo) >= 2) == (abs(float(y)) <= 1.0)
        assert svg.read_text().startswith("<svg")


class TestGww:
    def test_degenerate_single_row(self, tmp_path):
        out = tmp_path / "gww.csv"
        code = run(
            ["gww", "--dim", "1", "--points", "3", "--xmin", "0", "--xmax", "0",
             "--out", str(out)]
        )
        assert code == 0
        rows = out.read_text().splitlines()
        assert len(rows) == 2
        x, z, y = rows[1].split(",")
        assert float(z) == pytest.approx(1.0, abs=1e-12)
        assert float(y) == pytest.approx(0.0, abs=1e-12)

    def test_curve_file(self, tmp_path):
        out = tmp_path / "gww.csv"
        assert run(["gww", "--dim", "3", "--points", "21", "--out", str(out)]) == 0
        rows = out.read_text().splitlines()
        assert len(rows) == 22


class TestMc:
    def test_estimate_output(self, tmp_path):
        out = tmp_path / "mc.json"
        code = run(
            ["mc", "builtin:triangle@3", "--loop", "e1+ e2+ e3+",
             "--samples", "2000", "--seed", "5", "--out", str(out)]
        )
        assert code == 0
        data = json.loads(out.read_text())
        assert data["samples"] == 2000
        assert data["dim"] == 3
        assert data["method"] == "reweight"
        assert abs(data["mean_re"] + 0.2) < 0.05

    def test_check_eq_output(self, tmp_path):
        out = tmp_path / "eqcheck.json"
        code = run(
            ["mc", "builtin:triangle@3", "--loop", "e1+ e2+ e3+", "--check-eq",
             "--root", "e1", "--samples", "2000", "--seed", "5", "--out", str(out)]
        )
        assert code == 0
        data = json.loads(out.read_text())
        assert abs(data["residual_re"]) <= 5 * data["stderr"]

    def test_check_eq_requires_root(self, capsys):
        code = run(
            ["mc", "builtin:triangle@3", "--loop", "e1+ e2+ e3+", "--check-eq",
             "--samples", "10", "--seed", "1"]
        )
        assert code == 1
        assert "--root" in capsys.readouterr().err

    def test_dim_override(self, tmp_path):
        out = tmp_path / "mc.json"
        code = run(
            ["mc", TRIANGLE, "--loop", "e1+ e2+ e3+", "--dim-override", "2",
             "--samples", "500", "--seed", "2", "--out", str(out)]
        )
        assert code == 0
        assert json.loads(out.read_text())["dim"] == 2

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["mc", "builtin:triangle@3", "--loop", "e1+ e2+ e3+",
                "--samples", "1000", "--seed", "42"]
        assert run(args + ["--out", str(a)]) == 0
        assert run(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestUsage:
    def test_unknown_subcommand_exits_2(self):
        assert run(["frobnicate"]) == 2

    def test_no_args_exits_2(self):
        assert run([]) == 2

    def test_help_exits_0(self):
        assert run(["--help"]) == 0

    def test_subcommand_help_mentions_flags(self, capsys):
        assert run(["bootstrap", "--help"]) == 0
        out = capsys.readouterr().out
        for flag in ("--max-order", "--xmin", "--tol", "--svg", "--threads"):
            assert flag in out
