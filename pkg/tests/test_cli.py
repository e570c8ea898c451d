import csv

import pytest

from pnt.cli import run_cli
from pnt.solver import TRACE_COLUMNS

SYN = "N=200,n=50,seed=7"


def test_solve_writes_trace(tmp_path, capsys):
    out = tmp_path / "trace.csv"
    code = run_cli(["solve", "--synthetic", SYN, "--lambda", "1e-3", "--rho", "1", "--tol", "1e-10",
                    "--out", str(out)])
    assert code == 0
    rows = list(csv.reader(open(out)))
    assert tuple(rows[0]) == TRACE_COLUMNS and len(rows) > 2
    assert "status=Converged" in capsys.readouterr().out


def test_solve_nonconvergence_exit_one(tmp_path):
    out = tmp_path / "trace.csv"
    code = run_cli(["solve", "--synthetic", SYN, "--lambda", "1e-3", "--max-outer", "1", "--out", str(out)])
    assert code == 1 and out.exists()


def test_bench_table(tmp_path):
    out = tmp_path / "bench.csv"
    code = run_cli(["bench", "--synthetic", SYN, "--lambda", "1e-3", "--rho", "0.1,0.5,1",
                    "--tol", "1e-4,1e-8", "--out", str(out)])
    assert code == 0
    rows = list(csv.DictReader(open(out)))
    assert len(rows) == 3 * 2 + 2
    outer = {float(r["rho"]): int(r["outer"]) for r in rows if r["solver"] == "pnt" and r["tol"] == "1e-08"}
    assert outer[1.0] <= outer[0.5] <= outer[0.1]


def test_bench_deterministic_apart_from_time(tmp_path):
    tables = []
    for i in range(2):
        out = tmp_path / f"b{i}.csv"
        run_cli(["bench", "--synthetic", SYN, "--lambda", "1e-3", "--rho", "0.5,1", "--tol", "1e-6",
                 "--out", str(out)])
        tables.append([{k: v for k, v in r.items() if k != "time_s"} for r in csv.DictReader(open(out))])
    assert tables[0] == tables[1]


def test_solve_deterministic_bytes(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        run_cli(["solve", "--synthetic", SYN, "--lambda", "1e-3", "--rho", "0.5", "--out", str(p)])
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_rates_on_quadratic_trace(tmp_path, capsys):
    trace = tmp_path / "t.csv"
    with open(trace, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for k, g in enumerate([1e-1, 1e-2, 1e-4, 1e-8]):
            w.writerow([k, 1.0, g, 0, 0, 0, "unit_step", 1, 0, g])
    report = tmp_path / "rates.csv"
    assert run_cli(["rates", "--trace", str(trace), "--out", str(report)]) == 0
    assert "p=2.0 " in capsys.readouterr().out
    row = next(csv.DictReader(open(report)))
    assert float(row["fitted_p"]) == pytest.approx(2.0)


def test_rates_pipeline(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    run_cli(["solve", "--synthetic", SYN, "--lambda", "1e-3", "--rho", "1", "--tol", "1e-12", "--out", str(trace)])
    capsys.readouterr()
    assert run_cli(["rates", "--trace", str(trace)]) == 0
    p = float(capsys.readouterr().out.split()[0].split("=")[1])
    assert p >= 1.7


@pytest.mark.parametrize("problem", ["rank-deficient-ls", "norm-ray", "shifted-quadratic", "lasso-1d"])
def test_check_props(problem, tmp_path, capsys):
    out = tmp_path / "props.csv"
    assert run_cli(["check-props", "--problem", problem, "--samples", "200", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "violations=0" in text
    if problem == "norm-ray":
        assert "error_bound_ratio_growth" in text


def test_data_file_and_x0(tmp_path):
    data = tmp_path / "toy.libsvm"
    data.write_text("+1 1:1 2:0.5\n-1 1:-1 3:0.2\n+1 2:1\n-1 3:-1\n")
    x0 = tmp_path / "x0.txt"
    x0.write_text("0 0 0\n")
    assert run_cli(["solve", "--data", str(data), "--lambda", "1e-2", "--x0-file", str(x0)]) == 0
    x0.write_text("0 0\n")
    assert run_cli(["solve", "--data", str(data), "--x0-file", str(x0)]) == 2


@pytest.mark.parametrize("argv", [
    ["solve", "--data", "/nonexistent/file"],
    ["solve"],
    ["solve", "--synthetic", "N=3"],
    ["solve", "--synthetic", SYN, "--lambda", "-1"],
    ["solve", "--synthetic", SYN, "--theta", "2"],
    ["rates", "--trace", "/nonexistent.csv"],
    ["frobnicate"],
])
def test_usage_errors(argv):
    assert run_cli(argv) == 2


def test_malformed_data_file(tmp_path):
    bad = tmp_path / "bad.libsvm"
    bad.write_text("+1 5:abc\n")
    assert run_cli(["solve", "--data", str(bad)]) == 2
