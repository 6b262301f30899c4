import csv
import io
import math
import subprocess
import sys

import numpy as np
import pytest

from boscap.cli import CsvTable, SweepGrid, UsageError, cmd_fig1, cmd_fig2, cmd_fig3, main, parse_grid
from boscap.errors import DomainError
from boscap.nonlinear_spectra import squeeze_gain_asymptote
from boscap.thermal_core import wideband_capacity_closed


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    reader = csv.DictReader(io.StringIO(text))
    return [{k: float(v) for k, v in row.items()} for row in reader]


class TestGridParsing:
    def test_linear(self):
        grid = parse_grid("x", "0:1:5")
        np.testing.assert_allclose(grid.values(), [0, 0.25, 0.5, 0.75, 1])

    def test_log(self):
        np.testing.assert_allclose(parse_grid("x", "1:100:3:log").values(), [1, 10, 100])

    @pytest.mark.parametrize("text", ["1:2", "a:2:3", "1:2:3:cubic", "1:2:3.5"])
    def test_malformed(self, text):
        with pytest.raises(UsageError):
            parse_grid("x", text)

    @pytest.mark.parametrize("args", [(1, 2, 1, False), (2, 1, 3, False), (0, 1, 3, True)])
    def test_invariants(self, args):
        with pytest.raises(DomainError):
            SweepGrid("x", *args)


class TestCsvTable:
    def test_format(self):
        t = CsvTable(("a", "b"))
        t.add(2, 1 / 3)
        assert t.to_csv() == "a,b\n2.00000000000,0.333333333333\n"
        assert t.column("b") == [1 / 3]

    def test_ragged_row(self):
        with pytest.raises(ValueError):
            CsvTable(("a", "b")).add(1.0)


class TestNarrowband:
    def test_unit(self, capsys):
        code, out, err = run(capsys, "narrowband", "--omega", "1", "--energy", "1")
        assert code == 0 and err == ""
        assert out.splitlines() == ["omega,energy,capacity_bits", "1.00000000000,1.00000000000,2.00000000000"]

    def test_zero_energy(self, capsys):
        code, out, _ = run(capsys, "narrowband", "--omega", "1", "--energy", "0")
        assert code == 0 and rows(out)[0]["capacity_bits"] == 0.0

    def test_negative_omega(self, capsys):
        code, out, err = run(capsys, "narrowband", "--omega", "-1", "--energy", "1")
        assert code == 2 and out == ""
        assert len(err.strip().splitlines()) == 1 and "omega" in err and "> 0" in err

    @pytest.mark.parametrize("argv", [
        ["narrowband", "--omega", "1"],
        ["narrowband", "--omega", "x", "--energy", "1"],
        ["narrowband", "--omega", "1", "--energy", "1", "--bogus"],
        ["nonsense"],
        [],
    ])
    def test_usage(self, capsys, argv):
        code, out, err = run(capsys, *argv)
        assert code == 1 and out == "" and "usage" in err


class TestSingleChannels:
    def test_squeeze(self, capsys):
        code, out, _ = run(capsys, "squeeze", "--xi", "0.6", "--energy", "1")
        row = rows(out)[0]
        assert code == 0
        assert row["nu_eff"] == pytest.approx(0.8)
        assert row["capacity_bits"] == pytest.approx(2.22992113464, abs=1e-11)
        assert row["gain_bits"] == pytest.approx(0.229921134636, abs=1e-11)

    def test_squeeze_unbounded(self, capsys):
        code, _, err = run(capsys, "squeeze", "--xi", "1", "--energy", "1")
        assert code == 2 and "xi" in err

    def test_pdc2(self, capsys):
        code, out, _ = run(capsys, "pdc2", "--xi", "0.6", "--energy", "2")
        assert code == 0 and rows(out)[0]["capacity_bits"] == pytest.approx(4.45984226927, abs=1e-10)

    def test_swap(self, capsys):
        code, out, _ = run(capsys, "swap", "--xi", "0.5", "--energy", "2")
        row = rows(out)[0]
        assert code == 0
        assert row["e_low"] == pytest.approx(1.193, abs=1e-3)
        assert row["e_low"] + row["e_high"] == pytest.approx(2.0)
        assert row["delta_c_bits"] > 0


@pytest.mark.filterwarnings("ignore::boscap.broadband_pdc.PerturbativeWarning")
class TestFigures:
    def test_fig1(self):
        table = cmd_fig1(parse_grid("e", "1:1e6:7:log"), parse_grid("x", "0:0.9:4"))
        gains = np.array(table.column("gain_bits")).reshape(7, 4)
        assert np.all(gains >= 0)
        assert np.all(gains[:, 0] == 0)
        for x, gain in zip([0.0, 0.3, 0.6, 0.9], gains[-1]):
            assert abs(gain - squeeze_gain_asymptote(x)) <= 1e-3
        assert abs(gains[-1, 2] - 0.321928) <= 1e-3

    def test_fig1_zero_energy_row(self, capsys):
        code, out, _ = run(capsys, "fig1", "--energy-grid", "0:1:2", "--xi-grid", "0:0.5:3")
        data = rows(out)
        assert code == 0
        assert all(r["gain_bits"] == 0 for r in data if r["energy_ratio"] == 0)

    def test_fig1_row_order(self):
        table = cmd_fig1(parse_grid("e", "1:10:3"), parse_grid("x", "0:0.5:2"))
        keys = [(r[0], r[1]) for r in table.rows]
        assert keys == sorted(keys)

    def test_fig2(self):
        table = cmd_fig2(parse_grid("g", "1e-4:10:9:log"), pump_ratio=100)
        c0 = np.array(table.column("c0_bits"))
        c1 = np.array(table.column("c1_bits"))
        cap = np.array(table.column("capacity_bits"))
        assert np.all(c1 > 0)
        np.testing.assert_allclose(cap, 200 * (c0 + 0.1 * c1), rtol=1e-12)
        assert np.all(np.array(table.column("c_asym_bits")) > 0)

    def test_fig2_small_gamma(self):
        table = cmd_fig2(parse_grid("g", "1e-8:1e-7:2:log"))
        assert table.column("c0_bits")[0] / math.sqrt(1e-8) == pytest.approx(3.7007, rel=0.02)

    def test_fig2_no_coupling(self):
        table = cmd_fig2(parse_grid("g", "1e-3:1:4:log"), epsilon=0.0, pump_ratio=50)
        np.testing.assert_allclose(table.column("capacity_bits"), 100 * np.array(table.column("c0_bits")), rtol=1e-14)

    def test_fig2_default_warns(self, capsys):
        code, _, err = run(capsys, "fig2", "--gamma-grid", "1e-3:1e-2:3:log")
        assert code == 0
        assert err.count("warning") == 1

    def test_fig3(self):
        table = cmd_fig3(parse_grid("e", "1:100:3:log"), parse_grid("x", "0:0.999:4"))
        dc = np.array(table.column("delta_c_bits")).reshape(3, 4)
        assert np.all(dc >= -1e-10)
        assert np.all(dc[:, 0] == 0)
        assert np.all(np.diff(dc, axis=1) > 0)

    def test_fig3_sign_symmetry(self):
        pos = cmd_fig3(parse_grid("e", "1:100:3:log"), parse_grid("x", "0.1:0.9:3"))
        neg = cmd_fig3(parse_grid("e", "1:100:3:log"), parse_grid("x", "-0.9:-0.1:3"))
        a = np.array(pos.column("delta_c_bits")).reshape(3, 3)
        b = np.array(neg.column("delta_c_bits")).reshape(3, 3)[:, ::-1]
        np.testing.assert_allclose(a, b, rtol=1e-12)

    def test_fig3_divergence_row(self):
        table = cmd_fig3(parse_grid("e", "100:200:2"), parse_grid("x", "0.9:0.999:2"))
        dc = table.column("delta_c_bits")[1]
        assert dc > 0
        # the capacity at this point is within 40% of the leading-log law
        c = dc + 2 * math.log2(1 + 50) + 100 * math.log2(1 + 1 / 50)
        assert 1.0 < c / math.log2(100 / 0.001) < 1.4

    @pytest.mark.parametrize("argv", [
        ["fig1", "--energy-grid", "1:1e6:9:log", "--xi-grid", "0:0.9:4"],
        ["fig2", "--gamma-grid", "1e-4:10:9:log"],
        ["fig3", "--energy-grid", "1:1e3:5:log", "--xi-grid", "0:0.99:4"],
    ])
    def test_deterministic(self, capsys, argv):
        _, first, _ = run(capsys, *argv)
        _, second, _ = run(capsys, *argv)
        assert first == second and first


class TestBroadband:
    def test_exact_vs_discrete(self, capsys):
        flags = ["--delta-omega", "1e-4", "--xi", "0", "--energy", "20"]
        _, exact, _ = run(capsys, "pdc-exact", *flags)
        _, discrete, _ = run(capsys, "pdc-discrete", *flags)
        a, b = rows(exact)[0]["capacity_bits"], rows(discrete)[0]["capacity_bits"]
        assert abs(a / b - 1) < 1e-2

    def test_pdc_positivity_error(self, capsys):
        code, _, err = run(capsys, "pdc-exact", "--delta-omega", "1e-3", "--zeta", "0.9", "--xi", "0.3", "--energy", "1")
        assert code == 2 and "PositivityError" in err

    def test_swapband_single_comb(self, capsys):
        code, out, _ = run(capsys, "swapband", "--n-modes", "1", "--r", "0", "--energy", "1e5")
        row = rows(out)[0]
        assert code == 0
        assert abs(row["capacity_bits"] / wideband_capacity_closed(1e5, 1.0) - 1) < 5e-3

    def test_swapband_monotone(self, capsys):
        code, out, _ = run(capsys, "swapband", "--n-modes", "3", "--r-grid", "0:0.8:5", "--energy", "1e4")
        caps = [r["capacity_bits"] for r in rows(out)]
        assert code == 0 and np.all(np.diff(caps) > 0)

    def test_swapband_bad_r(self, capsys):
        code, _, err = run(capsys, "swapband", "--n-modes", "3", "--r", "1", "--energy", "10")
        assert code == 2 and "r must" in err


def test_output_file(tmp_path, capsys):
    path = tmp_path / "nb.csv"
    code, out, _ = run(capsys, "narrowband", "--omega", "1", "--energy", "1", "--output", str(path))
    assert code == 0 and out == ""
    assert path.read_bytes() == b"omega,energy,capacity_bits\n1.00000000000,1.00000000000,2.00000000000\n"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "boscap", "narrowband", "--omega", "2", "--energy", "2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1].endswith(",2.00000000000")


def test_fig3_default_grid(capsys):
    code, out, _ = run(capsys, "fig3")
    data = rows(out)
    assert code == 0 and len(data) == 26 * 12
    assert all(r["delta_c_bits"] == 0 for r in data if r["xi_ratio"] == 0)
