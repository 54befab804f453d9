import pytest

from kenmo.base import KenmoError
from kenmo.registry import REFERENCE_TABLES, ManifoldCase, fixture_names, load_fixture
from kenmo.tensors import Chart, MetricField, TensorField


def test_fixture_names():
    assert fixture_names() == [
        "m5_example",
        "warped_flat_n1",
        "warped_flat_n2",
        "warped_hyperbolic_plane_n2",
        "flat_rotation_r3",
    ]


def test_unknown_fixture():
    with pytest.raises(KenmoError, match="no fixture named 'm6'"):
        load_fixture("m6")


def test_m5_case(m5_case):
    assert m5_case.name == "m5_example"
    assert m5_case.table is REFERENCE_TABLES["m5_example"]
    assert len(m5_case.frame) == 5
    assert m5_case.soliton.mode == "eta_soliton"
    assert m5_case.soliton.lam is None


def test_sample_points_and_selection():
    case = load_fixture("flat_rotation_r3", sample_points=[{"x": 1, "y": 2, "z": 3}])
    assert case.sample_points == [{"x": 1, "y": 2, "z": 3}]
    assert case.structure is not None
    assert case.soliton is None
    assert case.selected("kenmotsu")
    case.checks = ["normal"]
    assert case.selected("normal")
    assert not case.selected("kenmotsu")


def test_analysis_is_cached(warped_n1_case):
    conn, bundle = warped_n1_case.analysis()
    assert warped_n1_case.analysis()[1] is bundle
    assert bundle.connection is conn


def test_case_validation(m5_case):
    with pytest.raises(ValueError, match="frame needs 5"):
        ManifoldCase(m5_case.metric, frame=m5_case.frame[:3])
    with pytest.raises(ValueError, match="unknown reference table"):
        ManifoldCase(m5_case.metric, reference_table="nope")
    chart = Chart.from_coordinates(["a", "b", "c"])
    other = MetricField.from_tensor(
        TensorField.from_entries(chart, 0, 2, {(i, i): 1 for i in range(3)})
    )
    with pytest.raises(ValueError, match="different charts"):
        ManifoldCase(other, m5_case.structure)


if __name__ == "__main__":
    pytest.main(["-x", __file__])
