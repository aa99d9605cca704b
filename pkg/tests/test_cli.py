import csv
import io
import json
import math
import subprocess
import sys

import pytest

from artifact import equilibrium as eqm
from artifact import kernels
from artifact.cli import main

ETA = math.log(5)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestRateTable:
    def test_grid(self, capsys):
        code, out, _ = run(capsys, "rate-table", "--x-min", "-1.5", "--x-max", "2.5", "--x-step", "0.01")
        assert code == 0
        table = rows(out)
        xs = [float(r["x"]) for r in table]
        assert len(xs) == 401
        assert all(b > a for a, b in zip(xs, xs[1:]))
        by_x = {round(float(r["x"]), 6): r for r in table}
        assert float(by_x[2.2]["F"]) == 0.0
        left = by_x[-1.2]
        assert left["regime"] == "OneCutLeft"
        assert all(left[k] == "" for k in "abcd")

    def test_header_and_digits(self, capsys):
        _, out, _ = run(capsys, "rate-table", "--x", "0.6")
        header, line = out.splitlines()
        assert header == "x,regime,K,L,F,dF,d2F,a,b,c,d"
        F = line.split(",")[4]
        assert float(F) == eqm.rate_function(ETA, 0.6)
        assert len(F.replace("0.", "", 1).lstrip("0")) >= 16
        assert "\r" not in out

    def test_deterministic_file(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (p1, p2):
            assert main(["rate-table", "--x", "-1", "0.1", "1.7", "--out", str(p)]) == 0
        assert p1.read_bytes() == p2.read_bytes()


class TestLogq:
    def test_t0_row(self, capsys):
        code, out, _ = run(capsys, "logq", "--t", "0", "1", "--s", "0")
        assert code == 0
        r0, r1 = rows(out)
        assert float(r0["logQ"]) == pytest.approx(kernels.log_Q_closed_t0(0, ETA), abs=1e-12)
        assert r0["predicted"] == ""
        assert float(r1["logQ"]) == pytest.approx(-1.018081236456733, abs=1e-10)

    def test_json_round_trip(self, capsys):
        code, out, _ = run(capsys, "logq", "--t", "2", "3", "--x", "0.6", "--format", "json")
        assert code == 0
        data = json.loads(out)
        assert [d["s"] for d in data] == [1, 2]
        assert set(data[0]) == {"t", "s", "logQ", "tail_bound", "predicted", "difference"}
        for d in data:
            assert d["difference"] == pytest.approx(d["logQ"] - d["predicted"])

    def test_precision_exit(self, capsys):
        code, out, err = run(capsys, "logq", "--t", "30", "--s", "0")
        assert code == 4
        assert out == ""
        assert "safe t" in err


class TestErrors:
    def test_bad_eta(self, capsys):
        code, out, err = run(capsys, "rate-table", "--eta", "-1", "--x", "0")
        assert (code, out) == (2, "")
        assert "eta" in err

    def test_empty_grid(self, capsys):
        assert run(capsys, "rate-table")[0] == 2

    def test_no_partial_output(self, capsys, tmp_path):
        # the second x is outside the two-cut interval
        p = tmp_path / "e.csv"
        code, out, _ = run(capsys, "endpoints", "--x", "0.5", "2.5", "--out", str(p))
        assert code == 2
        assert out == "" and not p.exists()

    def test_unknown_suite(self, capsys):
        assert run(capsys, "selftest", "--suite", "nope")[0] == 2

    def test_argparse_rejects(self):
        with pytest.raises(SystemExit) as exc:
            main(["rate-table", "--format", "xml"])
        assert exc.value.code == 2


class TestThinCommands:
    def test_density(self, capsys):
        code, out, _ = run(capsys, "density", "--x", "-1.5", "--mu", "0")
        assert code == 0
        assert float(rows(out)[0]["rho"]) == pytest.approx(0.5)

    def test_phi_minus(self, capsys):
        code, out, _ = run(capsys, "phi-minus", "--mu", "2")
        assert code == 0
        assert float(rows(out)[0]["phi_minus"]) == 0.0

    def test_toda_residual(self, capsys):
        code, out, _ = run(capsys, "toda-residual", "--t", "3", "--s", "1")
        assert code == 0
        assert float(rows(out)[0]["residual"]) < 1e-3

    def test_acoef(self, capsys):
        code, out, _ = run(capsys, "acoef")
        assert float(rows(out)[0]["A"]) == pytest.approx(-1 / 12, abs=1e-8)

    def test_compare_observables(self, capsys):
        code, out, _ = run(capsys, "compare-observables", "--x", "-1.5", "--t", "10")
        r = rows(out)[0]
        assert code == 0
        assert float(r["alphaHat"]) == pytest.approx(float(r["predicted_alpha"]), abs=0.1)


class TestSelftest:
    def test_single_suite(self, capsys):
        code, out, _ = run(capsys, "selftest", "--suite", "elliptic", "--seed", "3")
        assert code == 0
        assert out.strip() == "elliptic: pass"

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "artifact", "selftest", "--suite", "kernels"],
                              capture_output=True, text=True, timeout=300)
        assert proc.returncode == 0
        assert "kernels: pass" in proc.stdout
