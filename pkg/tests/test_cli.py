import csv
import io
import json

import pytest

from exactswap.cli import main, parse_fidelity, parse_grid, parse_int_list
from exactswap.errors import ValidationError


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_spectrum_n3(capsys):
    code, out, _ = run(capsys, "spectrum", "--n", "3")
    assert code == 0
    assert out == "m,E\n1,0.5\n2,0.5\n3,-1\n"


def test_spectrum_parity_error(capsys):
    code, _, err = run(capsys, "spectrum", "--n", "4")
    assert code == 2 and "odd" in err


def test_spectrum_verify_xxz(capsys):
    code, out, err = run(capsys, "spectrum", "--n", "9", "--model", "xxz", "--delta", "0.5", "--h", "0.1", "--verify")
    assert code == 0 and len(rows(out)) == 9 and "verify" in err


def test_xy_rejects_anisotropy(capsys):
    assert run(capsys, "spectrum", "--n", "5", "--delta", "0.3")[0] == 2


def test_scan_row_at_007(capsys):
    code, out, _ = run(capsys, "scan", "--exchange", "p1", "--n", "7", "--tau", "0:0.6:0.01")
    assert code == 0
    table = rows(out)
    assert len(table) == 61
    row = next(r for r in table if r["tau"] == "0.07")
    assert 0.49 <= float(row["best_p"]) <= 0.50


def test_scan_fidelity_column(capsys):
    code, out, _ = run(capsys, "scan", "--exchange", "p1", "--n", "7", "--tau", "0:0.6:0.01", "--fidelity", "0.94868,0.31623")
    assert code == 0
    assert max(float(r["fidelity"]) for r in rows(out)) == pytest.approx(0.97, abs=0.005)


def test_raw_scan_fails_with_defect(capsys):
    code, _, err = run(capsys, "scan", "--exchange", "pe", "--n", "7", "--raw", "--tau", "0:1:0.5")
    assert code == 3 and "not unitary" in err


def test_sweep_single_row(capsys):
    code, out, _ = run(capsys, "sweep", "--exchange", "p1", "--ns", "7", "--tau", "0:1:0.01")
    assert code == 0 and [r["N"] for r in rows(out)] == ["7"]


def test_oracle_pass(capsys):
    code, out, _ = run(capsys, "oracle", "--ns", "3,5,7", "--taus", "0.1,1,10")
    assert code == 0 and "overall: PASS" in out


def test_oracle_cap(capsys):
    code, _, err = run(capsys, "oracle", "--ns", "13")
    assert code == 2 and "12" in err


def test_oracle_demo(capsys):
    code, out, _ = run(capsys, "oracle", "--demo-gates")
    assert code == 0 and "|000111>" in out and "remote exchange" in out


def test_search_json(capsys):
    code, out, _ = run(capsys, "search", "--exchange", "p1", "--n", "5", "--tau", "0:2:0.01")
    assert code == 0 and json.loads(out)["found"] is False


def test_out_file_and_manifest(tmp_path, capsys):
    path = tmp_path / "scan.csv"
    args = ["scan", "--exchange", "p3", "--n", "7", "--tau", "0:0.2:0.1", "--out", str(path)]
    assert main(args) == 0
    first = path.read_bytes()
    assert main(args) == 0
    assert path.read_bytes() == first
    manifest = json.loads((tmp_path / "scan.csv.manifest.json").read_text())
    assert manifest["command"] == "scan" and manifest["parameters"]["n"] == 7


def test_clusters_json(tmp_path, capsys):
    path = tmp_path / "c.json"
    assert main(["scan", "--exchange", "p1", "--n", "5", "--tau", "0:0.1:0.1", "--clusters-json", str(path)]) == 0
    dump = json.loads(path.read_text())
    assert len(dump) == 2
    assert sum(c["p"] for c in dump[0]["clusters"]) == pytest.approx(1.0)


def test_jacobi_backend(capsys):
    code, out, _ = run(capsys, "scan", "--exchange", "pe", "--n", "5", "--tau", "0:0.3:0.1", "--backend", "jacobi")
    code2, out2, _ = run(capsys, "scan", "--exchange", "pe", "--n", "5", "--tau", "0:0.3:0.1")
    assert code == code2 == 0
    a, b = rows(out), rows(out2)
    assert all(abs(float(x["best_p"]) - float(y["best_p"])) < 1e-9 for x, y in zip(a, b))


def test_bad_inputs(capsys):
    assert run(capsys, "scan", "--exchange", "p1", "--n", "7", "--tau", "0:1")[0] == 2
    assert run(capsys, "scan", "--exchange", "p1", "--n", "7", "--initial", "x")[0] == 2
    assert run(capsys, "scan", "--exchange", "p1", "--n", "7", "--fidelity", "0.5,0.5")[0] == 2


def test_parsers():
    assert parse_int_list("5:13:4") == [5, 9, 13]
    assert parse_int_list("3,5") == [3, 5]
    assert parse_grid("0:1:0.5") == (0, 1, 0.5)
    a, b = parse_fidelity("0.94868,0.31623")
    assert a * a + b * b == pytest.approx(1, abs=1e-14)
    with pytest.raises(ValidationError):
        parse_int_list("a,b")
