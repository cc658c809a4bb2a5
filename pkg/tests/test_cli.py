import json
import subprocess
import sys
from fractions import Fraction

import pytest

from ocrp.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def report(text):
    return json.loads(text)


def metrics(doc):
    return dict((k, v) for k, v in doc["metrics"])


class TestVerify:
    def test_intertwining(self, capsys):
        code, out, _ = run(capsys, "verify", "intertwining", "--n", "6", "--alpha", "1/2")
        doc = report(out)
        assert code == 0 and doc["ok"] and doc["params"]["alpha"] == "1/2"

    def test_spectrum_lists_eigenvalues(self, capsys):
        code, out, _ = run(capsys, "verify", "spectrum", "--n", "8", "--alpha", "1/3")
        got = metrics(report(out))["eigenvalues"]
        want = ["1"] + [str(1 - Fraction(m * (m - 1), 72)) for m in range(2, 9)]
        assert code == 0 and got == want

    def test_semigroup(self, capsys):
        code, out, _ = run(capsys, "verify", "semigroup", "--n", "2", "--alpha", "1/2",
                           "--t", "0.25", "--tol", "1e-9")
        assert code == 0 and metrics(report(out))["max_error"] < 1e-9

    @pytest.mark.parametrize("subject", ["recurrence", "consistency", "generator",
                                         "generator-bernstein", "pieri", "bernstein",
                                         "h-family", "eta", "boundary"])
    def test_other_subjects_pass(self, capsys, subject):
        code, out, _ = run(capsys, "verify", subject, "--n", "4", "--alpha", "1/3")
        assert code == 0 and report(out)["ok"]

    def test_pieri_single_case(self, capsys):
        code, out, _ = run(capsys, "verify", "pieri", "--n", "9", "--i", "2", "--k", "5")
        assert code == 0 and metrics(report(out))["cases"] == 1

    def test_failure_exit_code(self, capsys):
        code, out, _ = run(capsys, "verify", "semigroup", "--n", "4", "--t", "0.1",
                           "--tol", "0")
        assert code == 1 and not report(out)["ok"] and report(out)["failures"]

    @pytest.mark.parametrize("argv", [
        ["verify", "intertwining", "--alpha", "0.5"],
        ["verify", "intertwining", "--alpha", "3/2"],
        ["verify", "nonsense"],
        ["verify", "intertwining", "--n", "21"],
        ["verify", "boundary", "--poly", "0,1"],
        ["verify", "pieri", "--n", "3", "--i", "1"],
        ["simulate", "--alpha", "1/2"],
        ["converge", "--alpha", "1/2", "--n-list", ""],
    ])
    def test_usage_errors(self, capsys, argv):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "r.json"
        code, out, _ = run(capsys, "verify", "eta", "--alpha", "1/2", "--out", str(path))
        assert code == 0 and path.read_text() == out

    def test_byte_identical(self, capsys):
        a = run(capsys, "verify", "generator", "--n", "5", "--alpha", "2/3")[1]
        b = run(capsys, "verify", "generator", "--n", "5", "--alpha", "2/3")[1]
        assert a == b


class TestSimulate:
    def test_ks_and_csv(self, capsys, tmp_path):
        path = tmp_path / "s.csv"
        code, out, _ = run(capsys, "simulate", "--n", "200", "--alpha", "1/2", "--t", "0.1",
                           "--samples", "10000", "--seed", "42", "--out", str(path))
        m = metrics(report(out))
        assert code == 0 and m["ks"] < 0.05 and m["ks_pass"]
        lines = path.read_text().splitlines()
        assert lines[0] == "replica,step,value" and len(lines) == 10_001
        assert lines[1].startswith("0,4000,")

    def test_trivial_n1(self, capsys, tmp_path):
        path = tmp_path / "s.csv"
        code, _, _ = run(capsys, "simulate", "--n", "1", "--alpha", "0.3", "--samples", "20",
                         "--out", str(path))
        values = [line.split(",")[2] for line in path.read_text().splitlines()[1:]]
        assert code == 0 and set(values) == {"1.0"}

    def test_deterministic_across_threads(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        common = ["simulate", "--n", "60", "--alpha", "1/3", "--samples", "700", "--every", "90"]
        ra = run(capsys, *common, "--seed", "5", "--threads", "1", "--out", str(a))[1]
        rb = run(capsys, *common, "--seed", "5", "--threads", "6", "--out", str(b))[1]
        assert a.read_bytes() == b.read_bytes() and ra == rb

    def test_decimal_alpha_accepted(self, capsys):
        code, out, _ = run(capsys, "simulate", "--n", "10", "--alpha", "0.4", "--samples", "50")
        assert code == 0 and report(out)["params"]["alpha"] == 0.4

    def test_unwritable_output(self, capsys, tmp_path):
        code, _, err = run(capsys, "simulate", "--n", "5", "--alpha", "1/2", "--samples", "5",
                           "--out", str(tmp_path / "missing" / "x.csv"))
        assert code == 1 and "ocrp:" in err


class TestConverge:
    def test_table(self, capsys):
        code, out, err = run(capsys, "converge", "--n-list", "2,50,100,200", "--alpha", "1/2",
                             "--t", "0.1", "--samples", "10000")
        lines = out.splitlines()
        assert lines[0] == "n,steps,samples,ks,exact" and len(lines) == 5
        assert lines[1].startswith("2,0,0,") and lines[1].endswith(",1")
        assert code == 0 and report(err)["ok"]

    def test_report_file(self, capsys, tmp_path):
        path = tmp_path / "c.json"
        code, _, err = run(capsys, "converge", "--n-list", "2,3", "--alpha", "3/4",
                           "--report", str(path))
        assert code == 0 and err == "" and report(path.read_text())["params"]["alpha"] == "3/4"

    def test_alpha_changes_reference(self, capsys):
        a = run(capsys, "converge", "--n-list", "4", "--alpha", "1/4")[1]
        b = run(capsys, "converge", "--n-list", "4", "--alpha", "3/4")[1]
        assert a != b


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ocrp.cli", "verify", "intertwining",
                           "--n", "3", "--alpha", "1/2"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["ok"]
