import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from hkforge.cli import EXIT_FAIL, EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_hk_table_ends_with_exact_limit(capsys):
    code, out, _ = run(capsys, "hk", "--ideal", "(x^2,y^3)", "--p", "2", "--emax", "5")
    assert code == EXIT_OK
    assert out.rstrip().splitlines()[-1] == "limit: 6 (exact-polynomial)"


def test_ghk_example(capsys):
    code, out, _ = run(capsys, "ghk", "--ideal", "(x^2,x*y*z,y^2)", "--p", "2", "--emax", "5")
    assert code == EXIT_OK and "limit: 1 (exact-polynomial)" in out


def test_amao_with_sat_keyword(capsys):
    code, out, _ = run(capsys, "amao", "--I", "(x^4,x^2*y^2*z^2,y^4)", "--J", "sat",
                       "--p", "2", "--emax", "5")
    assert code == EXIT_OK
    assert "J: (y^4, x^2*y^2, x^4)" in out and "limit: 8" in out


def test_amao_two_ideals(capsys):
    code, out, _ = run(capsys, "amao", "--I", "(x^2,y^2)", "--J", "(x,y^2)", "--emax", "4")
    assert code == EXIT_OK and "limit: 2" in out


def test_pc_check_holds(capsys):
    code, out, _ = run(capsys, "pc-check", "--ideal", "(x^2,x*y*z,y^2)", "--p", "2", "--c", "8")
    assert code == EXIT_OK and "holds" in out


def test_pc_check_saturated_ideal_c1(capsys):
    code, _, _ = run(capsys, "pc-check", "--ideal", "(x^2,x*y,y^2)", "--vars", "x,y,z",
                    "--p", "2", "--c", "1")
    assert code == EXIT_OK


def test_pc_check_failure_exit_code(capsys):
    code, out, _ = run(capsys, "pc-check", "--ideal", "(x^2,x*y*z,y^2)", "--p", "2", "--c", "1")
    assert code == EXIT_FAIL and "witness" in out


def test_pc_find_min(capsys):
    code, out, _ = run(capsys, "pc-check", "--ideal", "(x^2,x*y*z,y^2)", "--p", "2",
                       "--find-min", "--cmax", "8")
    assert code == EXIT_OK and out.rstrip().endswith(": 5")


def test_verify_ghk_amao(capsys):
    code, out, _ = run(capsys, "verify", "thm-ghk-amao", "--ideal", "(x^2,x*y*z,y^2)",
                       "--p", "2")
    assert code == EXIT_OK and out.startswith("PASS")
    assert "e_gHK direct: 1" in out and "lim a_F/q'^d: 1" in out


def test_verify_bbl(capsys):
    code, out, _ = run(capsys, "verify", "thm-bbl", "--family", "colon:(x,y):(x)", "--p", "2")
    assert code == EXIT_OK and out.startswith("PASS")
    assert "lim ell(R/I_q)/q^d: 1" in out and "lim e_HK(I_q)/q^d: 1" in out


def test_verify_cone(capsys):
    code, out, _ = run(capsys, "verify", "thm-cone", "--ideal", "(x,y)",
                       "--H", '{"a":["1","1"],"beta":"3"}')
    assert code == EXIT_OK and "fitted C: 3/2" in out and "volume: 7/2" in out


def test_verify_family(capsys):
    code, out, _ = run(capsys, "verify", "thm-ghk-family", "--family",
                       "saturated:(x^3,x*y*z,y^3)", "--p", "3")
    assert code == EXIT_OK and out.startswith("PASS")


def test_unknown_theorem(capsys):
    code, _, err = run(capsys, "verify", "thm-nope", "--ideal", "(x)")
    assert code == EXIT_PARSE and "unknown theorem" in err


def test_precondition_exit_with_witness(capsys):
    code, _, err = run(capsys, "hk", "--ideal", "(x^2,x*y*z,y^2)", "--p", "2")
    assert code == EXIT_PRECONDITION and "witness" in err


def test_malformed_json_is_parse_error(capsys):
    code, _, err = run(capsys, "hk", "--ideal", '{"p": 2, "vars": ["x"]')
    assert code == EXIT_PARSE


def test_bad_prime_is_precondition(capsys):
    code, _, _ = run(capsys, "hk", "--ideal", '{"p": 4, "vars": ["x"], "gens": [[1]]}')
    assert code == EXIT_PRECONDITION


def test_argparse_error_is_parse_error(capsys):
    code, _, _ = run(capsys, "hk")
    assert code == EXIT_PARSE


def test_empty_range(capsys):
    code, _, _ = run(capsys, "hk", "--ideal", "(x)", "--emin", "3", "--emax", "2")
    assert code == EXIT_PRECONDITION


def test_family_validate(capsys):
    code, out, _ = run(capsys, "family-validate", "--family", "colon:(x,y):(x)")
    assert code == EXIT_OK and "weakly-p" in out


def test_family_validate_rejects_custom_table(capsys, tmp_path):
    spec = {"type": "custom", "terms": {
        "0": {"p": 2, "vars": ["x"], "gens": [[1]]},
        "1": {"p": 2, "vars": ["x"], "gens": [[4]]}}}
    path = tmp_path / "fam.json"
    path.write_text(json.dumps(spec), encoding="utf-8")
    code, _, err = run(capsys, "family-validate", "--family", f"@{path}")
    assert code == EXIT_PRECONDITION and "witness" in err


def test_pbody_vol_exact_and_mc(capsys):
    code, out, _ = run(capsys, "pbody-vol", "--ideal", "(x^2,x*y,y^3)",
                       "--H", '{"a":["1","1"],"beta":"6"}', "--mc", "20000", "--seed", "4",
                       "--format", "json")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["volumes"]["exact"]["value"] == "14"
    mc = doc["volumes"]["monte_carlo"]
    assert mc["seed"] == 4 and mc["samples"] == 20000 and mc["prng"] == "numpy.PCG64"


def test_pbody_vol_general_family_reports_cutoff(capsys):
    code, out, _ = run(capsys, "pbody-vol", "--family", "saturated:(x^2,x*y*z,y^2)",
                       "--H", '{"a":["1","1","1"],"beta":"6"}', "--format", "json")
    doc = json.loads(out)
    assert doc["volumes"]["exact"]["method"] == "pbody-approx"
    assert doc["volumes"]["exact"]["cutoff"] == 16
    assert doc["volumes"]["exact"]["interval"][1] == "unbounded"
    assert doc["volumes"]["exact"]["flag"] == "cutoff-lower-bound"


# -- formats ---------------------------------------------------------------------------------------

def test_json_round_trip_exact_values(capsys):
    code, out, _ = run(capsys, "hk", "--ideal", "(x^2,x*y,y^3)", "--p", "3", "--format", "json")
    doc = json.loads(out)
    assert doc["estimate"]["limit"] == "4"
    for row in doc["table"]:
        assert Fraction(row["normalized"]) == Fraction(int(row["value"]), row["q"] ** 2)
    assert "graded" in doc["model"]


def test_csv_is_rfc4180(capsys):
    code, out, _ = run(capsys, "hk", "--ideal", "(x^2,x*y,y^3)", "--format", "csv",
                       "--emax", "3")
    assert "\r\n" in out
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["e", "q", "value", "value/q^d", "value/q^d exact"]
    assert rows[1:] == [["1", "2", "16", "4", "4"], ["2", "4", "64", "4", "4"],
                        ["3", "8", "256", "4", "4"]]


def test_verify_csv_has_outer_column(capsys):
    code, out, _ = run(capsys, "verify", "thm-ghk-amao", "--ideal", "(x^2,x*y*z,y^2)",
                       "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][0] == "q'" and len(rows) > 10


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "verify", "suite", "--format", "json", "--output", str(target))
    assert code == EXIT_OK and out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["verdict"] == "PASS"


def test_suite_json_is_byte_identical(tmp_path):
    blobs = []
    for k in range(2):
        target = tmp_path / f"suite{k}.json"
        assert main(["verify", "suite", "--format", "json", "--output", str(target)]) == 0
        blobs.append(target.read_bytes())
    assert blobs[0] == blobs[1]


def test_entry_point_subprocess():
    proc = subprocess.run([sys.executable, "-m", "hkforge.cli", "hk", "--ideal", "(x,y)",
                           "--emax", "4"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "limit: 1" in proc.stdout


@pytest.mark.parametrize("threads", ["1", "4"])
def test_thread_count_does_not_change_output(threads, tmp_path, monkeypatch):
    monkeypatch.setenv("HKFORGE_THREADS", threads)
    target = tmp_path / "s.json"
    assert main(["verify", "suite", "--format", "json", "--output", str(target)]) == 0
    monkeypatch.setenv("HKFORGE_THREADS", "1")
    ref = tmp_path / "r.json"
    assert main(["verify", "suite", "--format", "json", "--output", str(ref)]) == 0
    assert target.read_bytes() == ref.read_bytes()
