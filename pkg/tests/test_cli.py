import json

import pytest

from frobenius_pushforward.cli import EXIT_RESOURCE, EXIT_VALIDATION, main, parse_dvec
from frobenius_pushforward.exceptions import ValidationError
from frobenius_pushforward.frobenius import FrobBasis
from frobenius_pushforward.hypersurface import presentation_fk
from frobenius_pushforward.matfac import MatFac
from frobenius_pushforward.ring import parse_poly


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    return json.loads(out)


def test_matrix(capsys):
    report = run_json(capsys, "matrix", "--f", "x1^2", "--p", "3")
    assert report == {"rows": 3, "cols": 3, "entries": [[2, 0, "1"], [0, 1, "x1"], [1, 2, "x1"]]}


def test_matrix_command_on_x_squared_plus_xy(capsys):
    report = run_json(capsys, "matrix", "--f", "x1^2 + x1*x2", "--p", "3")
    assert (report["rows"], report["cols"]) == (9, 9)
    assert [0, 8, "x1*x2"] in report["entries"]
    assert len(report["entries"]) == 18


def test_matrix_power_and_csv(capsys):
    code, out, _ = run(capsys, "matrix", "--f", "x1^2", "--p", "3", "--power", "2", "--format", "csv")
    assert code == 0
    assert out == "row,col,entry\n1,0,x1\n2,1,x1\n0,2,x1^2\n\n"


def test_fsignature_closed_forms(capsys):
    report = run_json(capsys, "fsignature", "--type", "uv", "--dvec", "2,1")
    assert report == {"target": "uv", "dvec": [2, 1], "closed_form": "5/12"}
    report = run_json(capsys, "fsignature", "--type", "z2", "--dvec", "1,1")
    assert report["closed_form"] == "1/2"


def test_fsignature_sweep_is_cut_at_the_size_bound(capsys):
    report = run_json(capsys, "fsignature", "--type", "uv", "--f", "x1^2", "--p", "5", "--emax", "3")
    assert report["closed_form"] == "1/2"
    assert report["empirical"] == [
        {"e": 1, "s": "13/25", "gap": "1/50"},
        {"e": 2, "s": "313/625", "gap": "1/1250"},
    ]


def test_fsignature_needs_a_closed_form_or_a_sweep(capsys):
    code, _, err = run(capsys, "fsignature", "--type", "uv", "--f", "x1 + x2", "--p", "3")
    assert code == EXIT_VALIDATION
    assert err.startswith("error: ")


def test_decompose_monomial(capsys):
    report = run_json(capsys, "decompose", "--dvec", "2", "--p", "3")
    assert report["free_rank"] == 5
    assert report["summands"] == [{"c": [1], "multiplicity": 4}]
    assert report["threshold_ok"] is False


def test_decompose_general_polynomial(capsys):
    report = run_json(capsys, "decompose", "--f", "x1^2 + x1*x2", "--p", "3")
    assert report["r_e"] == 9
    assert len(report["blocks"]) == 2


def test_freerank(capsys):
    report = run_json(capsys, "freerank", "--type", "z2", "--f", "x1^3", "--p", "3")
    assert report == {"target": "z2", "p": 3, "e": 1, "f": "x1^3", "free_rank": 0}
    assert run_json(capsys, "freerank", "--f", "x1*x2", "--p", "3")["free_rank"] == 19
    report = run_json(capsys, "freerank", "--f", "x1^2", "--p", "3", "--k", "2")
    assert (report["target"], report["free_rank"]) == ("fk", 1)


def test_freerank_csv(capsys):
    code, out, _ = run(capsys, "freerank", "--f", "x1", "--p", "3", "--format", "csv")
    assert code == 0
    assert out == "target,p,e,f,free_rank\nuv,3,1,x1,9\n\n"


def test_verify(capsys):
    report = run_json(capsys, "verify", "--f", "x1^2 + x1*x2", "--p", "3", "--k", "1")
    assert report["matrix_factorization"] is True
    assert report["size"] == 9
    assert report["t"] + report["r"] <= 9


def test_verify_with_matrices(capsys):
    report = run_json(capsys, "verify", "--f", "x1^2", "--p", "3", "--k", "1", "--matrices")
    matfac = report["matfac"]
    assert (matfac["p"], matfac["variables"], matfac["f"], matfac["size"]) == (3, ["x1"], "x1^2", 3)
    assert matfac["phi"] == {"rows": 3, "cols": 3, "entries": [[2, 0, "1"], [0, 1, "x1"], [1, 2, "x1"]]}
    assert MatFac.from_dict(matfac) == presentation_fk(parse_poly("x1^2", 3, 1), 1, FrobBasis(3, 1, 1))
    assert "matfac" not in run_json(capsys, "verify", "--f", "x1^2", "--p", "3", "--k", "1")


@pytest.mark.parametrize("argv", [
    ["matrix", "--f", "x1^", "--p", "3"],
    ["matrix", "--f", "x1", "--p", "4"],
    ["matrix", "--f", "x1"],
    ["verify", "--f", "x1", "--p", "3"],
    ["verify", "--f", "x1", "--p", "3", "--k", "3"],
    ["freerank", "--type", "z2", "--f", "x1", "--p", "2"],
    ["decompose", "--dvec", "2,x", "--p", "3"],
    ["fsignature", "--type", "uv", "--f", "x1^2", "--p", "3", "--emax", "0"],
    ["matrix", "--f", "x1^2", "--p", "3", "--power", "0"],
    ["matrix", "--f", "x1^2", "--p", "3", "--k", "0"],
])
def test_validation_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_VALIDATION
    assert out == ""
    assert err.startswith("error: ")


def test_resource_bound(capsys):
    code, _, err = run(capsys, "matrix", "--f", "x1", "--p", "3", "--e", "20")
    assert code == EXIT_RESOURCE
    assert "exceeds" in err
    code, _, _ = run(capsys, "freerank", "--f", "x1*x2", "--p", "3", "--max-size", "5")
    assert code == EXIT_RESOURCE


def test_argparse_errors(capsys):
    with pytest.raises(SystemExit):
        main([])
    with pytest.raises(SystemExit):
        main(["matrix", "--type", "xy"])


def test_parse_dvec():
    assert parse_dvec("2, 1") == (2, 1)
    with pytest.raises(ValidationError):
        parse_dvec("0,1")
