import json
import subprocess
import sys

import pytest

from graphstein.cli import main, parse_kernel, UsageError
from graphstein.graph import count_edges, count_four_cycles, gen_gnp, read_edge_list
from graphstein.graphon import BlockStep, Constant
from graphstein.rng import SEED_ENV, stream


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(autouse=True)
def _no_env_seed(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)


def test_gen_count_chain(tmp_path, capsys):
    path = tmp_path / "g.txt"
    code, _, _ = run(capsys, "gen", "--n", "60", "--p", "0.5", "--seed", "42", "--out", str(path))
    assert code == 0
    g = read_edge_list(path)
    assert g == gen_gnp(60, 0.5, stream(42))
    code, out, _ = run(capsys, "count", "--in", str(path), "--no-timestamp")
    rep = json.loads(out)
    assert code == 0 and rep["t2"] == count_four_cycles(g) and rep["n"] == 60
    code, out, _ = run(capsys, "count", "--in", str(path), "--pattern", "k2", "--no-timestamp")
    assert json.loads(out)["t1"] == count_edges(g)


def test_gen_to_stdout_and_kernel(capsys):
    code, out, _ = run(capsys, "gen", "--n", "30", "--kernel", "block:[[0.7,0.3],[0.3,0.7]]", "--seed", "1")
    assert code == 0 and out.splitlines()[0].startswith("30 ")


def test_env_seed(monkeypatch, capsys):
    monkeypatch.setenv(SEED_ENV, "42")
    _, a, _ = run(capsys, "gen", "--n", "20", "--p", "0.5")
    _, b, _ = run(capsys, "gen", "--n", "20", "--p", "0.5", "--seed", "42")
    assert a == b


def test_test_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.txt"
    run(capsys, "gen", "--n", "120", "--p", "0.5", "--seed", "3", "--out", str(good))
    code, out, _ = run(capsys, "test", "--in", str(good), "--no-timestamp")
    assert code == 0 and json.loads(out)["reject"] is False
    bad = tmp_path / "bad.txt"
    run(capsys, "gen", "--n", "120", "--kernel", "block:[[0.9,0.1],[0.1,0.9]]", "--seed", "3", "--out", str(bad))
    code, out, _ = run(capsys, "test", "--in", str(bad), "--no-timestamp")
    assert code == 1 and json.loads(out)["reject"] is True


def test_confset_report(tmp_path, capsys):
    path = tmp_path / "g.txt"
    run(capsys, "gen", "--n", "80", "--p", "0.4", "--seed", "5", "--out", str(path))
    code, out, _ = run(capsys, "confset", "--in", str(path), "--alpha", "0.1")
    rep = json.loads(out)
    assert code == 0 and rep["alpha"] == 0.1 and "timestamp" in rep


def test_reruns_byte_identical(tmp_path, capsys):
    args = ("experiment", "--kind", "distance", "--n", "20", "--reps", "12", "--seed", "8", "--no-timestamp")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b
    _, c, _ = run(capsys, *args, "--jobs", "2")
    assert json.loads(c)["results"] == json.loads(a)["results"]


def test_permstat(tmp_path, capsys):
    path = tmp_path / "pi.txt"
    path.write_text("2 1 4 3\n")
    code, out, _ = run(capsys, "permstat", "--in", str(path), "--no-timestamp")
    rep = json.loads(out)
    assert code == 0 and rep["des"] == 2 and rep["inv"] == 2 and rep["permutation"] == "2 1 4 3"
    csv = tmp_path / "w.csv"
    code, out, _ = run(capsys, "permstat", "--n", "10", "--reps", "5", "--seed", "1", "--csv", str(csv))
    assert code == 0 and csv.read_text().splitlines()[0] == "rep,w1,w2"
    assert len(csv.read_text().splitlines()) == 6


def test_verify_coupling(capsys):
    code, out, _ = run(capsys, "verify-coupling", "--builtin", "graph", "--n", "5", "--p", "0.3", "--no-timestamp")
    rep = json.loads(out)
    assert code == 0 and rep["pass"] is True
    assert rep["moments"]["max_error"] <= 1e-10
    code, out, _ = run(capsys, "verify-coupling", "--builtin", "permutation", "--n", "4", "--bounds")
    rep = json.loads(out)
    assert code == 0 and "equal_marginal" in rep and "bound_terms" in rep
    code, out, _ = run(capsys, "verify-coupling", "--builtin", "coins", "--mode", "mc", "--reps", "2000", "--seed", "2")
    assert code == 0


@pytest.mark.parametrize(
    "argv",
    [
        ("gen", "--n", "10", "--p", "0.5"),
        ("gen", "--n", "10", "--seed", "1"),
        ("gen", "--n", "10", "--p", "1.5", "--seed", "1"),
        ("experiment", "--kind", "power", "--n", "20", "--seed", "1"),
        ("verify-coupling", "--builtin", "graph", "--n", "9"),
        ("count",),
        ("gen", "--n", "10", "--kernel", "wave:3", "--seed", "1"),
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_bad_file_reports_line(tmp_path, capsys):
    path = tmp_path / "g.txt"
    path.write_text("4 2\n0 1\n0 9\n")
    code, _, err = run(capsys, "count", "--in", str(path))
    assert code == 2 and "line 3" in err


def test_parse_kernel(tmp_path):
    assert isinstance(parse_kernel("const:0.25"), Constant)
    f = tmp_path / "k.json"
    f.write_text(json.dumps({"values": [[0.6, 0.4], [0.4, 0.6]], "breakpoints": [0.3]}))
    k = parse_kernel(f"block:{f}")
    assert isinstance(k, BlockStep)
    for bad in ("const:x", "block:[[0.5, 0.1], [0.2, 0.5]]", f"block:{tmp_path / 'missing.json'}"):
        with pytest.raises(UsageError):
            parse_kernel(bad)


def test_console_script_exit_code():
    res = subprocess.run(
        [sys.executable, "-m", "graphstein.cli", "gen", "--n", "5"],
        capture_output=True, text=True, env={"PATH": "/usr/bin:/bin"},
    )
    assert res.returncode == 2
