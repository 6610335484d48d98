import json
import subprocess
import sys

import pytest

from gyrokit import cyclic_table, read_table, write_table
from gyrokit.cli import OUT_ENV, main


def run(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, (json.loads(out.read_text()) if out.suffix == ".json" and out.exists() else out)


def test_verify_pass(tmp_path):
    code, doc = run(["verify", "--cyclic", "4"], tmp_path)
    assert code == 0 and doc["status"] == "pass"
    assert doc["result"]["degenerate_group"] is True
    assert doc["report"]["mode"] == "exhaustive"


def test_verify_disk_is_not_degenerate(tmp_path):
    code, doc = run(["verify", "--mobius", "--samples", "500"], tmp_path)
    assert code == 0 and doc["result"]["degenerate_group"] is False
    assert len(doc["result"]["witness"]) == 3


def test_non_gyrogroup_table_exits_1(tmp_path):
    # Z4 with two entries of row 1 swapped: rows are still permutations
    t = cyclic_table(4)
    t[1, [1, 2]] = t[1, [2, 1]]
    p = tmp_path / "bad.tbl"
    write_table(p, t)
    code, doc = run(["verify", "--table", str(p)], tmp_path)
    assert code == 1 and doc["status"] == "fail"
    assert any(e["status"] == "fail" and e["counterexample"] is not None for e in doc["properties"])


def test_malformed_file_exits_2_with_position(tmp_path, capsys):
    p = tmp_path / "broken.tbl"
    p.write_text("gyrotable v1 n=2\n0 1\n1 q\n")
    assert main(["verify", "--table", str(p)]) == 2
    assert f"{p}:3:3" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["verify"],
    ["verify", "--cyclic", "4", "--klein"],
    ["cosets", "--mobius", "--sub", "0"],
    ["probe", "--cyclic", "4", "--x", "1"],
    ["search"],
    ["search", "--n", "40"],
    ["chain", "--cyclic", "4"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "gyrokit: error:" in capsys.readouterr().err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_subgyro_false_exits_1(tmp_path):
    code, doc = run(["subgyro", "--cyclic", "4", "--sub", "0,1"], tmp_path)
    assert code == 1 and doc["properties"][0]["counterexample"] == [1, 1]
    code, doc = run(["subgyro", "--cyclic", "4", "--sub", "0,2"], tmp_path)
    assert code == 0 and doc["result"]["is_L_subgyrogroup"] == "yes"


def test_subgyro_generated_on_disk(tmp_path):
    code, doc = run(["subgyro", "--mobius", "--gen", "0.1", "--cap", "6"], tmp_path)
    assert code == 0 and doc["result"]["partial"] is True
    code, _ = run(["subgyro", "--mobius", "--gen", "0.1", "--cap", "6", "--strict"], tmp_path)
    assert code == 1


def test_gyr_table(tmp_path):
    code, doc = run(["gyr-table", "--mobius", "--at", "0.5i,0.5"], tmp_path)
    assert code == 0
    re, im = doc["result"]["factor"]
    assert complex(re, im) == pytest.approx((15 + 8j) / 17)
    code, doc = run(["gyr-table", "--cyclic", "3"], tmp_path)
    assert doc["result"]["nontrivial_pairs"] == []


def test_cosets_and_quotient_artifact(tmp_path):
    code, doc = run(["cosets", "--cyclic", "6", "--sub", "0,3"], tmp_path)
    assert code == 0 and doc["result"]["blocks"] == [[0, 3], [1, 4], [2, 5]]
    tbl = tmp_path / "q.tbl"
    code = main(["quotient", "--cyclic", "6", "--sub", "0,3", "--out", str(tbl), "--report",
                 str(tmp_path / "q.json")])
    assert code == 0
    t, meta = read_table(tbl)
    assert t.tolist() == [[0, 1, 2], [1, 2, 0], [2, 0, 1]]
    assert meta["provenance"] == "gyrokit quotient"


def test_ill_defined_quotient_exits_1(tmp_path, gyro8):
    p = tmp_path / "g.tbl"
    write_table(p, gyro8[0].table)
    tbl = tmp_path / "q.tbl"
    code = main(["quotient", "--table", str(p), "--sub", "0,2", "--out", str(tbl), "--report",
                 str(tmp_path / "q.json")])
    assert code == 1 and not tbl.exists()
    doc = json.loads((tmp_path / "q.json").read_text())
    assert len(doc["result"]["witness"]) == 4


def test_setcheck(tmp_path):
    code, doc = run(["setcheck", "--cyclic", "4", "--A", "1", "--B", "1", "--C", "3"], tmp_path)
    assert code == 0 and doc["result"] == {"lhs_empty": True, "rhs_empty": True, "verdict": "pass"}
    code, doc = run(["setcheck", "--klein", "--all"], tmp_path)
    assert code == 0 and doc["result"]["triples"] == 4096


def test_chain_modes(tmp_path):
    code, _ = run(["chain", "--mobius", "--radii", "geometric", "--samples", "300"], tmp_path)
    assert code == 0
    code, doc = run(["chain", "--mobius", "--radii", "harmonic"], tmp_path)
    assert code == 1
    code, _ = run(["chain", "--cyclic", "4", "--sets", "0,1,2,3;0,2", "--check", "invariant-set",
                   "--base-sets", "0,1,2,3;0,2", "--F", "0,2"], tmp_path)
    assert code == 0


def test_prenorm_exact_json(tmp_path):
    art = tmp_path / "pn.json"
    code = main(["prenorm", "--cyclic", "4", "--sets", "0,1,2,3;0,2;0", "--out", str(art),
                 "--report", str(tmp_path / "r.json")])
    assert code == 0
    assert json.loads(art.read_text()) == {"f": [0, 1, 0.5, 1], "N": [0, 1, 0.5, 1]}


def test_prenorm_disk_csv(tmp_path):
    art = tmp_path / "grid.csv"
    code = main(["prenorm", "--mobius", "--depth", "5", "--grid", "12", "--sup-samples", "50", "--samples",
                 "100", "--out", str(art), "--report", str(tmp_path / "r.json")])
    assert code == 0
    lines = art.read_text().splitlines()
    assert lines[0] == "x,y,N" and len(lines) == 1 + 144
    rows = [line.split(",") for line in lines[1:]]
    # row-major: x varies fastest
    assert float(rows[0][1]) == float(rows[1][1]) and float(rows[0][0]) < float(rows[1][0])
    assert float(rows[0][0]) == pytest.approx(-0.95)
    assert "nan" in {r[2] for r in rows}
    assert all(len(r[2].split(".")[-1]) <= 12 for r in rows)


def test_prenorm_invalid_chain_exits_1(tmp_path):
    code = main(["prenorm", "--cyclic", "4", "--sets", "0,1,2,3;0,1,3", "--report", str(tmp_path / "r.json")])
    assert code == 1


def test_metric(tmp_path):
    code, doc = run(["metric", "--cyclic", "4", "--sets", "0,1,2,3;0,2;0"], tmp_path)
    assert code == 0
    assert doc["result"]["rho"][0] == [0, 2, 1, 2]


def test_probe(tmp_path):
    code, doc = run(["probe", "--mobius", "--x", "0.1", "--radius", "0.5"], tmp_path)
    assert code == 0 and doc["result"]["outcome"] == "escape" and doc["result"]["step"] == 3
    code, doc = run(["probe", "--cyclic", "4", "--x", "2", "--U", "0,2"], tmp_path)
    assert doc["result"]["outcome"] == "contained"
    code, doc = run(["probe", "--mobius", "--x", "1e-3", "--radius", "0.99999", "--cap", "3"], tmp_path)
    assert code == 0 and doc["result"]["outcome"] == "inconclusive"
    code, _ = run(["probe", "--mobius", "--x", "1e-3", "--radius", "0.99999", "--cap", "3", "--strict"], tmp_path)
    assert code == 1


def test_search_writes_tables(tmp_path):
    d = tmp_path / "tables"
    code = main(["search", "--n", "6", "--out", str(d), "--report", str(tmp_path / "s.json")])
    assert code == 0
    assert sorted(p.name for p in d.iterdir()) == ["n6_0.tbl", "n6_1.tbl"]
    doc = json.loads((tmp_path / "s.json").read_text())
    assert doc["result"]["count"] == 2 and doc["result"]["degenerate"] == [True, True]


def test_search_budget_is_flagged(tmp_path):
    rep = tmp_path / "s.json"
    assert main(["search", "--n", "7", "--budget", "20", "--report", str(rep)]) == 0
    doc = json.loads(rep.read_text())
    assert doc["budget_exhausted"] is True and doc["result"]["complete"] is False
    assert main(["search", "--n", "7", "--budget", "20", "--report", str(rep), "--strict"]) == 1


def test_out_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "env"))
    assert main(["verify", "--cyclic", "3"]) == 0
    assert main(["quotient", "--cyclic", "4", "--sub", "0,2"]) == 0
    names = sorted(p.name for p in (tmp_path / "env").iterdir())
    assert names == ["quotient.json", "quotient.tbl", "verify.json"]


def test_json_flag_and_summary(capsys):
    assert main(["verify", "--cyclic", "2", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "pass"
    assert main(["verify", "--cyclic", "2"]) == 0
    assert capsys.readouterr().out.startswith("verify: PASS")


def test_timing_flag(tmp_path):
    code, doc = run(["verify", "--cyclic", "2", "--timing"], tmp_path)
    assert doc["timing"]["seconds"] >= 0


def test_product_carrier(tmp_path):
    code, doc = run(["verify", "--cyclic", "2", "--times", "cyclic:3"], tmp_path)
    assert code == 0 and doc["result"]["degenerate_group"] is True


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "gyrokit.cli", "verify", "--cyclic", "2"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "PASS" in out.stdout
