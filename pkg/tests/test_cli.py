import csv
import io
import json

import pytest

from pprkit.cli import main


@pytest.fixture
def k2(tmp_path):
    p = tmp_path / "k2.graph"
    p.write_text("2 1\n0 1\n")
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_estimate_bp(capsys, k2):
    code, out, _ = run(capsys, "estimate", "--algo", "bp", "--graph", k2, "--target", 1, "--delta", 0.1)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1 and rows[0]["queries_jump"] == "0"


def test_estimate_single_node_full_model(capsys, tmp_path):
    g = tmp_path / "g.graph"
    g.write_text("4 4\n0 1\n1 2\n2 3\n3 0\n")
    code, out, _ = run(capsys, "estimate", "--algo", "single-node", "--graph", g, "--target", 0,
                       "--model", "jump,sorted,adj", "--c", 0.45, "--pf", 0.5, "--with-exact")
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert int(row["queries_sorted"]) >= 1
    assert all(int(row[k]) >= 0 for k in row if k.startswith("queries_"))


def test_exit_codes(capsys, k2, tmp_path):
    assert run(capsys, "estimate", "--algo", "single-node", "--graph", k2, "--model", "jump")[0] == 3
    assert run(capsys, "estimate", "--algo", "bp", "--graph", tmp_path / "missing")[0] == 2
    bad = tmp_path / "bad.graph"
    bad.write_text("2 1\n0 0\n")
    code, _, err = run(capsys, "exact", "--graph", bad, "--target", 0)
    assert code == 2 and "line 2" in err
    assert run(capsys, "estimate", "--algo", "nope", "--graph", k2)[0] == 4
    assert run(capsys, "verify", "--suite", "nope")[0] == 4
    assert run(capsys, "estimate", "--algo", "bp", "--graph", k2, "--target", 5)[0] == 4
    assert run(capsys, "bench", "--algo", "bmc-node", "--family", "sn-worst", "--sweep", "m",
               "--grid", "256,512")[0] == 4
    assert run(capsys)[0] == 4


def test_csv_flag_writes_file(capsys, k2, tmp_path):
    out = tmp_path / "o.csv"
    assert run(capsys, "estimate", "--algo", "mc", "--graph", k2, "--source", 0, "--csv", out,
               "--trials", 3, "--c", 0.3)[0] == 0
    assert len(out.read_text().strip().splitlines()) == 4


def test_exact(capsys, k2):
    code, out, _ = run(capsys, "exact", "--graph", k2, "--target", 1)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and float(rows[2][1]) == pytest.approx(5 / 9)
    code, out, _ = run(capsys, "exact", "--graph", k2, "--pagerank")
    assert code == 0 and float(list(csv.reader(io.StringIO(out)))[1][1]) == pytest.approx(0.5)


def test_gen_with_swaps(capsys, tmp_path):
    base = tmp_path / "base.graph"
    code, out, _ = run(capsys, "gen", "--family", "sp-worst", "--n", 16, "--m", 40, "--delta", 0.1,
                       "--out", base, "--swap-out", tmp_path / "sw", "--swaps", 3, "--seed", 4)
    assert code == 0
    info = json.loads(out)
    assert info["family"] == "sp-worst"
    manifest = (tmp_path / "sw" / "swaps.tsv").read_text().splitlines()
    assert manifest[0].split("\t") == ["index", "q1", "q2", "q3", "q4"]
    assert len(manifest) == 4
    assert (tmp_path / "sw" / "swap_2.graph").exists()


def test_bench_fit(capsys, tmp_path):
    out = tmp_path / "b.csv"
    code, stdout, _ = run(capsys, "bench", "--algo", "bmc-node", "--family", "sn-worst", "--sweep", "m",
                          "--grid", "256:4096:5", "--trials", 5, "--c", 0.45, "--pf", 0.5,
                          "--csv", out, "--no-timing")
    summary = json.loads(stdout)
    assert code == 0 and summary["passed"]
    assert abs(summary["slope"] - 0.5) <= 0.15


def test_verify_separation(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "separation", "--family", "sp-worst", "--n", 60,
                       "--m", 120, "--delta", 0.05)
    assert code == 0 and json.loads(out)["passed"]


def test_verify_invariants(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "invariants")
    assert code == 0
    assert all(json.loads(line)["passed"] for line in out.splitlines())
