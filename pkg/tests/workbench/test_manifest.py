from fractions import Fraction

import pytest

from kenmo.base import EtaReplacedWarning, ManifestError, SingularMetricError
from kenmo.registry import load_fixture
from kenmo.workbench import dump_manifest, load_manifest, parse_manifest

HYPERBOLIC = """\
[manifold]
coordinates = x, y

[metric]
g_x_x = 1/y^2
g_x_y = 0
g_y_y = 1/y^2

[sample_points]
p1 = x=1, y=1/2
"""

FLAT3 = """\
[manifold]
coordinates = x, y, z

[metric]
g_x_x = 1
g_x_y = 0
g_x_z = 0
g_y_y = 1
g_y_z = 0
g_z_z = 1
"""


def _error(text) -> ManifestError:
    with pytest.raises(ManifestError) as info:
        parse_manifest(text)
    return info.value


def test_parse_hyperbolic():
    case = parse_manifest(HYPERBOLIC, name="hyperbolic")
    assert case.name == "hyperbolic"
    assert case.chart.coordinates == ("x", "y")
    assert case.metric.g[1, 1] == case.chart.scalar("1/y^2")
    assert case.structure is None and case.soliton is None and case.frame is None
    assert case.checks is None
    assert case.sample_points == [{"x": Fraction(1), "y": Fraction(1, 2)}]


def test_structure_and_soliton_sections():
    text = FLAT3 + "\n[structure]\nphi_y_x = 1\nphi_x_y = -1\nxi_z = 1\n"
    text += "\n[soliton]\nV_z = 1\nlambda = 0\nmu = 0\n\n[checks]\nselect = normal, kenmotsu\n"
    case = parse_manifest(text)
    s = case.structure
    assert s.phi[1, 0] == 1
    assert s.eta[2] == 1
    assert case.soliton.mode == "eta_soliton"
    assert case.soliton.lam == 0
    assert case.checks == ["normal", "kenmotsu"]
    assert not case.selected("almost_contact")


def test_gradient_soliton_defaults_to_gradient_mode():
    case = parse_manifest(FLAT3 + "\n[structure]\nxi_z = 1\n\n[soliton]\nf = z^2/2\n")
    assert case.soliton.is_gradient
    assert case.soliton.f == case.chart.scalar("z^2/2")


def test_eta_replaced():
    text = FLAT3 + "\n[structure]\nphi_y_x = 1\nphi_x_y = -1\nxi_z = 1\neta_z = 2\n"
    with pytest.warns(EtaReplacedWarning):
        case = parse_manifest(text)
    assert case.structure.eta[2] == 1


def test_expression_error_position():
    err = _error(HYPERBOLIC.replace("g_x_x = 1/y^2", "g_x_x = 1 +* y"))
    assert (err.line, err.column) == (5, 12)
    assert str(err).startswith("line 5, column 12: g_x_x:")


@pytest.mark.parametrize(
    "old, new, line, message",
    [
        ("g_x_y = 0\n", "", 4, "g_x_y is missing"),
        ("g_x_y = 0", "g_x_w = 0", 6, "names a coordinate"),
        ("g_x_y = 0", "h_x_y = 0", 6, "unknown key"),
        ("[sample_points]", "[extras]", 9, "unknown section [extras]"),
        ("p1 = x=1, y=1/2", "p1 = x=1", 10, "lacks y"),
        ("p1 = x=1, y=1/2", "p1 = x=1, y=a", 10, "not a rational number"),
        ("p1 = x=1, y=1/2", "p1 = x=1, w=2", 10, "unknown coordinate"),
    ],
)
def test_manifest_errors(old, new, line, message):
    err = _error(HYPERBOLIC.replace(old, new))
    assert err.line == line
    assert message in err.message


def test_structural_errors():
    assert "[section] header" in _error("coordinates = x\n").message
    assert "missing [manifold]" in _error("[metric]\ng_x_x = 1\n").message
    assert "missing [metric]" in _error("[manifold]\ncoordinates = x\n").message
    duplicate = HYPERBOLIC.replace("g_x_y = 0", "g_x_x = 2")
    assert _error(duplicate).line == 6
    assert "odd dimension" in _error(HYPERBOLIC + "\n[structure]\nxi_y = y\n").message
    checks = _error(FLAT3 + "\n[checks]\nselect = kenmotsu, wibble\n")
    assert "unknown check 'wibble'" in checks.message
    both = _error(FLAT3 + "\n[structure]\nxi_z = 1\n\n[soliton]\nV_z = 1\nf = z\n")
    assert "not both" in both.message
    mode = _error(FLAT3 + "\n[structure]\nxi_z = 1\n\n[soliton]\nV_z = 1\nmode = ricci\n")
    assert "mode must be one of" in mode.message


def test_singular_metric():
    text = HYPERBOLIC.replace("g_x_y = 0", "g_x_y = 1/y^2")
    with pytest.raises(SingularMetricError):
        parse_manifest(text)


def test_load_manifest(tmp_path):
    path = tmp_path / "hyperbolic.kenmo"
    path.write_text(HYPERBOLIC)
    assert load_manifest(path).name == "hyperbolic"
    with pytest.raises(ManifestError, match="cannot read"):
        load_manifest(tmp_path / "missing.kenmo")


@pytest.mark.parametrize("name", ["m5_example", "warped_flat_n1", "flat_rotation_r3"])
def test_dump_is_a_fixed_point(name):
    case = load_fixture(name, sample_points=[])
    text = dump_manifest(case)
    again = parse_manifest(text, name=name)
    assert dump_manifest(again) == text
    assert (again.metric.g - case.metric.g).is_zero()
    if case.structure is not None:
        assert (again.structure.phi - case.structure.phi).is_zero()
        assert (again.structure.xi - case.structure.xi).is_zero()


def test_dump_m5_contents():
    text = dump_manifest(load_fixture("m5_example"))
    assert text.startswith("# m5_example\n[manifold]\ncoordinates = x, y, z, u, v\n")
    assert "reference_table = m5_example" in text
    assert "e5_v = -v" in text
    assert "V_x = 2*x" in text
    assert "mode = eta_soliton" in text


def test_dump_exp_generators():
    text = dump_manifest(load_fixture("warped_flat_n1"))
    assert "exp_generators = t" in text
    assert "g_x_x = exp(2*t)" in text


def test_dump_sample_points():
    case = load_fixture("flat_rotation_r3", sample_points=[{"x": 1, "y": Fraction(1, 2), "z": 3}])
    text = dump_manifest(case)
    assert "p1 = x=1, y=1/2, z=3" in text
    assert parse_manifest(text).sample_points == [{"x": 1, "y": Fraction(1, 2), "z": 3}]


if __name__ == "__main__":
    pytest.main(["-x", __file__])
