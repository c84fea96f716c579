import json

import numpy as np
import pytest

from microlocal import laggr as lg
from microlocal.cli import main
from microlocal.stratspace import preset


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_preset(capsys):
    code, out, _ = run(capsys, "validate", "p1")
    assert code == 0 and "result: pass" in out


def test_validate_broken(capsys, tmp_path):
    obj = preset("interval").to_json()
    obj["incidences"].append(["e", "zz", 1])
    p = tmp_path / "broken.json"
    p.write_text(json.dumps(obj))
    code, out, _ = run(capsys, "validate", str(p))
    assert code == 1 and "unknown-cell" in out


def test_parse_error_has_position(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"cells": [\n  {"id": "a",}\n]}')
    code, _, err = run(capsys, "validate", str(p))
    assert code == 2 and "line 2" in err


def test_missing_field(capsys, tmp_path):
    p = tmp_path / "nofield.json"
    p.write_text('{"incidences": []}')
    code, _, err = run(capsys, "validate", str(p))
    assert code == 2 and "cells" in err


def test_unknown_option(capsys):
    code, _, _ = run(capsys, "validate", "p1", "--bogus")
    assert code == 2


def test_sheaf_report_p1(capsys):
    code, out, _ = run(capsys, "sheaf-report", "p1", "std:U[1]", "--perversity", "--cc")
    assert code == 0
    assert "perverse: yes" in out and "CC = (U:1, 0:1, inf:1)" in out


def test_sheaf_report_explicit_cells(capsys):
    code, out, _ = run(capsys, "sheaf-report", "p1", "std:e1,e2,f1,f2[1]", "--perversity", "--cc")
    assert code == 0 and "CC = (U:1, 0:1, inf:1)" in out


def test_sheaf_report_not_perverse(capsys):
    code, out, _ = run(capsys, "--json", "sheaf-report", "p1", "const", "--perversity")
    rep = json.loads(out)
    assert code == 1 and rep["perversity"]["stalks"]["witnesses"]
    assert rep["perversity"]["agree"]


def test_sheaf_report_all_sections(capsys):
    code, out, _ = run(capsys, "--json", "sheaf-report", "c-origin", "std:C*[1]")
    rep = json.loads(out)
    assert code == 0
    assert {"perversity", "cc", "morse_groups", "singular_support", "duality"} <= set(rep)


def test_sheaf_errors(capsys):
    assert run(capsys, "sheaf-report", "p1", "std:zz")[0] == 2
    assert run(capsys, "sheaf-report", "p1", "std:p0")[0] == 2  # not open
    assert run(capsys, "sheaf-report", "circle", "const")[0] == 2  # no curated data
    assert run(capsys, "sheaf-report", "p1", "nonsense")[0] == 2


def test_sheaf_json_file(capsys, tmp_path):
    from microlocal.sheafcat import shift_sheaf, standard_object
    sp = preset("p1")
    p = tmp_path / "F.json"
    p.write_text(json.dumps(shift_sheaf(standard_object(sp, sp.stratum("U").cells), 1).to_json()))
    code, out, _ = run(capsys, "sheaf-report", "p1", str(p), "--cc")
    assert code == 0 and "CC = (U:1, 0:1, inf:1)" in out


def test_decompose(capsys):
    code, out, _ = run(capsys, "--json", "decompose", "p1", "std:U[1]")
    rep = json.loads(out)
    assert code == 0 and rep["sections_match"]


def test_decompose_not_generated(capsys):
    code, out, _ = run(capsys, "decompose", "interval", "sky:b")
    assert code == 1 and "not generated" in out


def test_ainfty_circle(capsys):
    code, out, _ = run(capsys, "ainfty", "--preset", "circle", "--max-arity", "6")
    assert code == 0 and "relations through arity 6: pass" in out


def test_ainfty_structure_file(capsys, tmp_path):
    code, out, _ = run(capsys, "--json", "ainfty", "--preset", "circle", "--dump")
    obj = json.loads(out)["structure"]
    obj["m"]["X,X,X"] = [[i, o, str(-int(c)) if i == [1, 0] else c] for i, o, c in obj["m"]["X,X,X"]]
    p = tmp_path / "A.json"
    p.write_text(json.dumps(obj))
    code, out, _ = run(capsys, "--json", "ainfty", "--structure", str(p))
    rep = json.loads(out)
    assert code == 1 and rep["relations"]["arity"] == 3


def test_morse(capsys):
    code, out, _ = run(capsys, "morse", "interval", "--trees")
    assert code == 0 and "transfer = trees: yes" in out
    code, out, _ = run(capsys, "morse", "interval", "--endpoint-pair")
    assert code == 0
    assert run(capsys, "morse", "circle", "--subdivision", "6")[0] == 2


def test_degree_planes(capsys, tmp_path):
    p = tmp_path / "planes.json"
    p.write_text(json.dumps({"planes": [lg.zero_section(1).to_json(), lg.fiber(1, theta=2.0).to_json()]}))
    code, out, _ = run(capsys, "--json", "degree", "--planes", str(p))
    rep = json.loads(out)
    assert code == 0 and abs(rep["degree"] - 3) < 1e-9
    assert np.allclose(rep["angles"], [-0.25, -0.25])


def test_degree_errors(capsys, tmp_path):
    p = tmp_path / "same.json"
    z = lg.zero_section(1).to_json()
    p.write_text(json.dumps({"planes": [z, z]}))
    assert run(capsys, "degree", "--planes", str(p))[0] == 2


def test_degree_random(capsys):
    code, out, _ = run(capsys, "degree", "--random", "100", "--seed", "4")
    assert code == 0


@pytest.mark.parametrize("argv", [
    ["validate", "disc"],
    ["sheaf-report", "p1", "std:U[1]"],
    ["ainfty", "--preset", "random", "--seed", "3", "--max-arity", "4"],
    ["morse", "circle"],
    ["degree", "--random", "50", "--seed", "9"],
])
def test_json_deterministic(capsys, argv):
    _, a, _ = run(capsys, "--json", *argv)
    _, b, _ = run(capsys, "--json", *argv)
    assert a == b
    rep = json.loads(a)
    assert rep["schema"] == "microlocal.report/1" and rep["command"] == argv[0]
