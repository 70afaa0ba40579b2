import json
import os
import subprocess
import sys
from fractions import Fraction

import jsonschema
import pytest

from antipode import hypercube, padic_space, petersen, validate_metric
from antipode.cli import main
from antipode.errors import FormatError
from antipode.fileio import format_edge_list, format_matrix, parse_matrix, read_edge_list, read_matrix, sniff
from antipode.report import analyze_graph, analyze_space, load_schema


def run(*argv, env=None):
    """Run the CLI in a subprocess so exit codes and byte output are real."""
    full_env = dict(os.environ, **(env or {}))
    return subprocess.run([sys.executable, "-m", "antipode", *argv], capture_output=True, text=True, env=full_env)


def report(*argv):
    out = run(*argv)
    assert out.returncode == 0, out.stderr
    return json.loads(out.stdout)


@pytest.fixture(scope="module")
def analysis_validator():
    return jsonschema.Draft202012Validator(load_schema("analysis_report"))


@pytest.fixture(scope="module")
def sample_validator():
    return jsonschema.Draft202012Validator(load_schema("sample_report"))


def test_matrix_round_trip():
    X = validate_metric([[0, "1/2", 1], ["1/2", 0, "1/2"], [1, "1/2", 0]], ["1/2", "1/4", "1/4"])
    text = format_matrix(X, with_weights=True)
    assert sniff(text) == "matrix"
    Y = read_matrix(text)
    assert Y.to_fractions() == X.to_fractions() and Y.weights == X.weights


def test_edge_list_round_trip():
    g = petersen()
    text = format_edge_list(g)
    assert sniff(text) == "edges" and text.startswith("10 15\n")
    h = read_edge_list(text)
    assert h.edges().tolist() == g.edges().tolist()


@pytest.mark.parametrize("text", ["", "2\n0 1\n", "2\n0 x\n1 0\n", "3 2\n0 1\n", "3 1\n0 5\n", "3 2\n0 1\n1 0\n",
                                  "2\n0 1\n1 0\nw: 1\n"])
def test_parse_errors(text):
    with pytest.raises(FormatError):
        if text and sniff(text) == "matrix":
            parse_matrix(text)
        else:
            read_edge_list(text)


def test_comments_ignored():
    X = read_matrix("# two points\n2\n0 3/2\n3/2 0\n")
    assert X.distance(0, 1) == Fraction(3, 2)


def test_generate_hypercube(tmp_path):
    out = tmp_path / "q4.txt"
    res = run("generate", "hypercube", "--d", "4", "-o", str(out))
    assert res.returncode == 0 and "16 vertices, 32 edges" in res.stdout
    assert out.read_text().splitlines()[0] == "16 32"


def test_generate_cycle_stdout():
    res = run("generate", "cycle", "--n", "12")
    lines = res.stdout.splitlines()
    assert lines[0] == "12 12" and len(lines) == 13


def test_generate_padic():
    res = run("generate", "padic", "--p", "2", "--k", "3")
    rows = res.stdout.splitlines()
    assert rows[0] == "8" and len(rows) == 9
    entries = {Fraction(t) for row in rows[1:] for t in row.split()}
    assert entries <= {Fraction(0), Fraction(1), Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)}


def test_generate_bad_parameters():
    for argv in (["cycle", "--n", "2"], ["padic", "--p", "4", "--k", "2"], ["hypercube"],
                 ["cayley-abelian", "--moduli", "5", "--connection", "1"]):
        res = run("generate", *argv)
        assert res.returncode == 2, argv
        assert len(res.stderr.strip().splitlines()) == 1


def test_analyze_hypercube_10(analysis_validator):
    r = report("analyze", "--family", "hypercube", "--d", "10")
    analysis_validator.validate(r)
    assert r["bounds"]["A"] == "5" and r["bounds"]["lower_tight"] is True
    assert r["antipodality"]["tier"] == "STRICTLY_ANTIPODAL"
    assert r["violations"] == []


def test_analyze_petersen(analysis_validator):
    r = report("analyze", "--family", "petersen")
    analysis_validator.validate(r)
    b = r["bounds"]
    assert (b["A"], b["E_d2"], b["lower_tight"], b["upper_tight"]) == ("3/2", "27/10", False, False)
    assert b["decimal"]["A"] == "1.5"
    assert r["antipodality"]["tier"] == "ANTIPODAL"
    assert r["transitivity"]["status"] == "certified" and r["transitivity"]["group_order"] == "120"


def test_triangle_violation_exit_code(tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("3\n0 5 10\n5 0 1\n10 1 0\n")
    res = run("analyze", str(f))
    assert res.returncode == 4
    assert "(0,2,1)" in res.stderr


def test_exit_codes(tmp_path):
    dis = tmp_path / "dis.txt"
    dis.write_text("4 2\n0 1\n2 3\n")
    assert run("analyze", str(dis)).returncode == 3
    garbage = tmp_path / "garbage.txt"
    garbage.write_text("3 x\n")
    assert run("analyze", str(garbage)).returncode == 1
    assert run("analyze", str(tmp_path / "missing.txt")).returncode == 1
    assert run("analyze", "--family", "path", "--n", "4", "--fast-path").returncode == 2
    assert run("analyze").returncode == 2
    assert run("sample", "sphere", "--d", "0", "--n", "1000").returncode == 2
    assert run("sample", "sphere", "--bins", "5", "--n", "1000").returncode == 2


def test_no_aut_reports_evidence_required(analysis_validator):
    r = report("analyze", "--family", "cycle", "--n", "8", "--no-aut")
    analysis_validator.validate(r)
    assert r["antipodality"]["error"] == "EvidenceRequired" and r["antipodality"]["tier"] is None
    assert r["transitivity"]["status"] == "skipped"


def test_fast_path_agrees_with_full(analysis_validator):
    full = report("analyze", "--family", "hypercube", "--d", "6")
    fast = report("analyze", "--family", "hypercube", "--d", "6", "--fast-path")
    analysis_validator.validate(fast)
    assert fast["bounds"] == full["bounds"] and fast["distribution"] == full["distribution"]
    assert fast["antipodality"]["tier"] == full["antipodality"]["tier"]


def test_negative_controls_have_no_violations(analysis_validator):
    r = report("analyze", "--family", "path", "--n", "3")
    analysis_validator.validate(r)
    assert r["transitivity"]["status"] == "refuted"
    assert r["bounds"]["lower_ok"] is False
    assert r["violations"] == []  # the bounds are not claimed for non-homogeneous spaces
    assert r["symmetry"]["passed"] is False and r["symmetry"]["first_violation"] == "0"


def test_csv_format():
    res = run("analyze", "--family", "cycle", "--n", "8", "--format", "csv")
    assert res.stdout.splitlines() == ["distance,mass,mass_decimal", "0,1/8,0.125", "1,1/4,0.25",
                                       "2,1/4,0.25", "3,1/4,0.25", "4,1/8,0.125"]


@pytest.mark.parametrize("argv, build", [
    (["petersen"], lambda: analyze_graph(petersen(), {})),
    (["hypercube", "--d", "5"], lambda: analyze_graph(hypercube(5), {})),
    (["padic", "--p", "3", "--k", "2"], lambda: analyze_space(padic_space(3, 2).space, {})),
])
def test_round_trip_digest(tmp_path, argv, build):
    f = tmp_path / "space.txt"
    assert run("generate", *argv, "-o", str(f)).returncode == 0
    from_file = report("analyze", str(f))
    from_family = report("analyze", "--family", *argv)
    in_memory = build().to_dict()
    assert from_file["results_digest"] == from_family["results_digest"] == in_memory["results_digest"]
    assert from_file["input"]["kind"] == "file" and len(from_file["input"]["sha256"]) == 64


def test_sample_sphere_d2(sample_validator):
    r = report("sample", "sphere", "--d", "2", "--n", "1000000", "--seed", "7")
    sample_validator.validate(r)
    est = r["estimate"]
    assert est["ci99_lo"] <= 1.5707963 <= est["ci99_hi"]
    assert r["symmetry"]["passed"] and r["fit"]["passed"]


def test_sample_byte_identical(tmp_path):
    a = run("sample", "sphere", "--d", "1", "--n", "1000", "--seed", "7")
    b = run("sample", "sphere", "--d", "1", "--n", "1000", "--seed", "7", env={"ANTIPODE_THREADS": "3"})
    assert a.returncode == 0 and a.stdout == b.stdout


def test_sample_torus(tmp_path, sample_validator):
    csv = tmp_path / "hist.csv"
    r = report("sample", "torus", "--n", "1000000", "--seed", "7", "--csv", str(csv))
    sample_validator.validate(r)
    assert 0.35355 < r["estimate"]["mean"] < 0.70711
    lines = csv.read_text().splitlines()
    assert lines[0] == "bin_lo,bin_hi,mass" and len(lines) == 65
    assert sum(float(x.split(",")[2]) for x in lines[1:]) == pytest.approx(1)


def test_main_in_process(capsys):
    assert main(["analyze", "--family", "complete", "--n", "4"]) == 0
    r = json.loads(capsys.readouterr().out)
    assert r["extremal"]["upper"] is True and r["bounds"]["upper_tight"] is True
