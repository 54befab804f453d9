import json

import pytest

from kenmo import __version__
from kenmo.registry import load_fixture
from kenmo.workbench import digest, dump_manifest
from kenmo.workbench.cli import build_parser, main

HYPERBOLIC = """\
[manifold]
coordinates = x, y

[metric]
g_x_x = 1/y^2
g_x_y = 0
g_y_y = 1/y^2
"""


@pytest.fixture
def hyperbolic_path(tmp_path):
    path = tmp_path / "hyperbolic.kenmo"
    path.write_text(HYPERBOLIC)
    return path


@pytest.fixture
def warped_path(tmp_path):
    """warped_flat_n1 as a manifest; [soliton] is the last section"""

    def write(extra=""):
        path = tmp_path / "warped.kenmo"
        path.write_text(dump_manifest(load_fixture("warped_flat_n1")) + extra)
        return str(path)

    return write


def _json(capsys, argv):
    code = main(argv + ["--format", "json"])
    return code, json.loads(capsys.readouterr().out)


def test_version_and_usage(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.strip() == f"kenmo {__version__}"
    assert main([]) == 2
    assert main(["soliton", "warped_flat_n1"]) == 2
    assert main(["soliton", "warped_flat_n1", "--solve", "--verify"]) == 2


def test_fixtures(capsys):
    assert main(["fixtures", "list"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].startswith("m5_example")
    assert len(out.splitlines()) == 5
    assert main(["fixtures", "dump", "warped_flat_n1"]) == 0
    assert capsys.readouterr().out == dump_manifest(load_fixture("warped_flat_n1"))
    assert main(["fixtures", "dump"]) == 2
    assert "needs a fixture name" in capsys.readouterr().err
    assert main(["fixtures", "dump", "m6"]) == 2


def test_check_structure(capsys):
    code, out = _json(capsys, ["check-structure", "warped_flat_n1"])
    assert code == 0
    assert out["passed"] is True
    assert out["source"] == "warped_flat_n1"
    assert out["digest"] == digest(dump_manifest(load_fixture("warped_flat_n1")))
    names = [v["name"] for v in out["verdicts"]]
    assert names[0] == "positive_definite"
    assert names[-1] == "kenmotsu"

    code, out = _json(capsys, ["check-structure", "flat_rotation_r3"])
    assert code == 1
    kenmotsu = out["verdicts"][-1]
    assert kenmotsu["witness"]["labels"] == ["x", "y", "z"]


def test_check_structure_needs_structure(capsys, hyperbolic_path):
    assert main(["check-structure", str(hyperbolic_path)]) == 2
    assert "no [structure] section" in capsys.readouterr().err


def test_selected_checks(capsys, warped_path):
    path = warped_path("\n[checks]\nselect = normal, kenmotsu\n")
    code, out = _json(capsys, ["check-structure", path])
    assert code == 0
    assert [v["name"] for v in out["verdicts"]] == ["normal", "kenmotsu"]


def test_curvature(capsys, hyperbolic_path):
    code, out = _json(capsys, ["curvature", str(hyperbolic_path)])
    assert code == 0
    data = out["data"]
    assert data["scalar_curvature"] == "-2"
    assert data["christoffel"]["Gamma^y_xx"] == "1/y"
    assert data["ricci"] == {"Ric_xx": "-1/y^2", "Ric_yy": "-1/y^2"}
    assert "R^x_xyy" in data["riemann"]
    assert "R^x_yxy" not in data["riemann"]
    assert "eta_einstein" not in data
    assert out["warnings"] == []


def test_curvature_text_and_structure_data(capsys):
    assert main(["curvature", "warped_flat_n1"]) == 0
    text = capsys.readouterr().out
    assert "scalar_curvature = -6" in text
    assert text.endswith("all checks passed\n")
    code, out = _json(capsys, ["curvature", "warped_flat_n1"])
    assert out["data"]["eta_einstein"] == {"alpha": "-2", "beta": "0", "exact": True}
    assert out["data"]["phi_holomorphic"]["H"] == "-1"


def test_degenerate_structure_fails_check(capsys, tmp_path):
    text = dump_manifest(load_fixture("warped_flat_n1"))
    path = tmp_path / "no_phi.kenmo"
    path.write_text("\n".join(line for line in text.splitlines() if not line.startswith("phi_")))
    code, out = _json(capsys, ["curvature", str(path)])
    assert code == 1
    assert not out["passed"]
    assert out["verdicts"][-1]["name"] == "curvature"
    assert out["verdicts"][-1]["notes"] == ["phi vanishes identically"]
    assert capsys.readouterr().err == ""


def test_json_is_deterministic(capsys, hyperbolic_path):
    _, first = _json(capsys, ["curvature", str(hyperbolic_path)])
    _, second = _json(capsys, ["curvature", str(hyperbolic_path)])
    first.pop("timing")
    second.pop("timing")
    assert first == second
    assert first["digest"] == digest(HYPERBOLIC)


def test_soliton_solve(capsys):
    code, out = _json(capsys, ["soliton", "warped_flat_n1", "--solve"])
    assert code == 0
    assert out["data"]["soliton"] == {
        "mode": "eta_soliton",
        "lambda": "1",
        "mu": "1",
        "classification": "expanding",
    }
    subchecks = [sub["name"] for sub in out["verdicts"][0]["subchecks"]]
    assert subchecks[:3] == ["lie_curvature_reeb", "lambda_plus_mu", "lie_connection_reeb"]
    assert "constant_curvature_in_dimension_three" in subchecks
    assert subchecks[-1] == "reeb_invariant_scalar"


def test_soliton_verify(capsys, warped_path):
    code, out = _json(capsys, ["soliton", warped_path("lambda = 1\nmu = 1\n"), "--verify"])
    assert code == 0
    code, out = _json(capsys, ["soliton", warped_path("lambda = 1\nmu = 0\n"), "--verify"])
    assert code == 1
    verdict = out["verdicts"][0]
    assert verdict["witness"]["labels"] == ["t", "t"]
    subchecks = [sub["name"] for sub in verdict["subchecks"]]
    assert "einstein_from_collinear_potential" not in subchecks
    assert main(["soliton", warped_path("lambda = 1\nmu = 1\n"), "--solve"]) == 2
    assert main(["soliton", "warped_flat_n1", "--verify"]) == 2
    assert "--verify needs lambda and mu" in capsys.readouterr().err


def test_oracle(capsys, hyperbolic_path):
    code, out = _json(capsys, ["oracle", str(hyperbolic_path), "--points", "2"])
    assert code == 0
    assert len(out["data"]["oracle"]["points"]) == 2
    code, out = _json(capsys, ["oracle", str(hyperbolic_path), "--points", "1", "--tol", "1e-30"])
    assert code == 1
    poles = hyperbolic_path.parent / "poles.kenmo"
    poles.write_text(HYPERBOLIC + "\n[sample_points]\np1 = x=0, y=0\n")
    assert main(["oracle", str(poles)]) == 2
    assert "every sample point was skipped" in capsys.readouterr().err


def test_manifest_errors(capsys, tmp_path):
    bad = tmp_path / "bad.kenmo"
    bad.write_text(HYPERBOLIC.replace("g_x_x = 1/y^2", "g_x_x = 1 +* y"))
    assert main(["curvature", str(bad)]) == 2
    assert "line 5, column 12" in capsys.readouterr().err
    assert main(["curvature", str(tmp_path / "missing.kenmo")]) == 2
    singular = tmp_path / "singular.kenmo"
    singular.write_text(HYPERBOLIC.replace("g_x_y = 0", "g_x_y = 1/y^2"))
    assert main(["curvature", str(singular)]) == 1


def test_parser_defaults():
    args = build_parser().parse_args(["oracle", "m5_example"])
    assert (args.points, args.tol, args.step, args.seed) == (5, 1e-6, 1e-4, 421)
    assert args.format == "text"


if __name__ == "__main__":
    pytest.main(["-x", __file__])
