from fractions import Fraction

import numpy as np
import pytest

from kenmo.base import ChartMismatchError, SingularMetricError, SlotError
from kenmo.tensors import (
    Chart,
    MetricField,
    TensorField,
    check_positive_definite,
    contract,
    differential,
    directional_derivative,
    exterior_derivative_1form,
    exterior_derivative_2form,
    gradient,
    lie_bracket,
    lie_derivative,
    lower_index,
    matrix_rank_at,
    metric_inverse,
    raise_index,
    tensor_product,
    wedge_1_2,
)
from kenmo.utilities import rng, set_seed


@pytest.fixture
def polar():
    chart = Chart.from_coordinates(["r", "th"])
    g = MetricField.from_tensor(TensorField.from_entries(chart, 0, 2, {(0, 0): 1, (1, 1): "r^2"}))
    return chart, g


def test_chart_basics(polar):
    chart, _ = polar
    assert chart.dimension == 2
    assert chart.coordinate_vector("th")[1] == 1
    assert chart.coordinate_form(0)[0] == 1
    assert contract(chart.identity(), 0, 0).scalar() == 2
    with pytest.raises(SlotError):
        chart.coordinate_vector(2)
    with pytest.raises(ValueError):
        TensorField.from_array(chart, 0, 2, [[1, 0]])
    with pytest.raises(ValueError, match="contravariant_rank must be nonnegative"):
        TensorField(chart, -1, 0, np.empty((), dtype=object))


def test_metric_inverse_and_det(polar):
    chart, g = polar
    assert g.g_inv[1, 1] == chart.scalar("1/r^2")
    assert g.g_inv[0, 1] == 0
    assert g.volume_factor == chart.scalar("r^2")
    assert metric_inverse(g.g)[0, 0] == 1


def test_metric_validation(polar):
    chart, _ = polar
    with pytest.raises(SingularMetricError):
        MetricField.from_tensor(TensorField.from_array(chart, 0, 2, [["r", "r"], ["r", "r"]]))
    with pytest.raises(ValueError, match="not symmetric"):
        MetricField.from_tensor(TensorField.from_array(chart, 0, 2, [[1, "r"], [0, 1]]))
    with pytest.raises(SlotError):
        MetricField.from_tensor(chart.identity())


def test_arithmetic_and_chart_checks(polar):
    chart, g = polar
    other = Chart.from_coordinates(["x", "y"])
    X = chart.vector(["r", 1])
    assert (X + X - X * 2).is_zero()
    assert (X / "r")[0] == 1
    assert (-X)[1] == -1
    with pytest.raises(ChartMismatchError):
        X + other.vector([1, 0])
    with pytest.raises(SlotError):
        X + chart.covector([1, 0])
    witness = (X - chart.vector(["r", 0])).first_nonzero()
    assert witness.index == (1,)
    assert witness.labels == ("th",)
    assert witness.value == 1


def test_apply_and_inner(polar):
    chart, g = polar
    X = chart.vector([1, 1])
    assert g.inner(X, X) == chart.scalar("1 + r^2")
    assert g.g.apply(X).covariant_rank == 1
    with pytest.raises(SlotError):
        g.g.apply(X, X, X)


def test_raise_lower_roundtrip(polar):
    chart, g = polar
    omega = chart.covector(["r", "th"])
    up = raise_index(omega, 0, g)
    assert up[1] == chart.scalar("th/r^2")
    back = lower_index(up, 0, g)
    assert (back - omega).is_zero()
    T = tensor_product(chart.vector([1, "r"]), chart.covector([0, 1]))
    # moving the new index in front of the existing upper index
    raised = raise_index(lower_index(T, 0, g), 0, g, position=0)
    assert (raised - T).is_zero()
    with pytest.raises(SlotError):
        raise_index(omega, 1, g)
    with pytest.raises(SlotError):
        lower_index(omega, 0, g)


def test_contract_and_product(polar):
    chart, _ = polar
    T = tensor_product(chart.vector([1, 2]), chart.covector([3, 4]))
    assert (T.contravariant_rank, T.covariant_rank) == (1, 1)
    assert T[1, 0] == 6
    assert contract(T, 0, 0).scalar() == 11
    with pytest.raises(SlotError):
        contract(T, 1, 0)


def test_symmetrize_and_permute(polar):
    chart, _ = polar
    A = TensorField.from_array(chart, 0, 2, [[0, 2], [0, 0]])
    S = A.symmetrize()
    assert S[0, 1] == 1 and S[1, 0] == 1
    assert A.permute_covariant([1, 0])[1, 0] == 2
    with pytest.raises(SlotError):
        A.permute_covariant([0, 0])


def test_lie_bracket_and_derivatives():
    chart = Chart.from_coordinates(["x", "y"])
    dx = chart.coordinate_vector("x")
    X = chart.vector([0, "x"])
    assert (lie_bracket(dx, X) - chart.coordinate_vector("y")).is_zero()
    f = chart.scalar("x^2*y")
    assert directional_derivative(f, X) == chart.scalar("x^3")
    # L_V on a scalar is V(f)
    assert lie_derivative(chart.constant_scalar(f), X).scalar() == chart.scalar("x^3")
    # L_X dx = d(X^x) = 0, L_X dy = dx
    assert lie_derivative(chart.coordinate_form("y"), X)[0] == 1
    assert exterior_derivative_1form(differential(f, chart)).is_zero()


def _random_polynomial(names, degree=2):
    terms = []
    for _ in range(3):
        c = int(rng.integers(-3, 4))
        powers = rng.integers(0, degree + 1, size=len(names))
        terms.append("*".join([str(c)] + [f"{n}^{int(p)}" for n, p in zip(names, powers) if p]))
    return " + ".join(terms).replace("+ -", "- ")


def _random_tensor(chart, p, q):
    return TensorField.from_function(chart, p, q, lambda *_: _random_polynomial(chart.coordinates))


def test_jacobi_identity(rand_seed):
    set_seed(rand_seed)
    chart = Chart.from_coordinates(["x", "y", "z"])
    X, Y, Z = (_random_tensor(chart, 1, 0) for _ in range(3))
    jacobi = (
        lie_bracket(X, lie_bracket(Y, Z))
        + lie_bracket(Y, lie_bracket(Z, X))
        + lie_bracket(Z, lie_bracket(X, Y))
    )
    assert jacobi.is_zero()
    assert (lie_bracket(X, Y) + lie_bracket(Y, X)).is_zero()
    # on vector fields the Lie derivative is the bracket
    assert (lie_derivative(Y, X) - lie_bracket(X, Y)).is_zero()


@pytest.mark.parametrize("rank", [(0, 0), (1, 0), (0, 1), (1, 1), (0, 2), (1, 2)])
def test_lie_derivative_of_bracket(rank, rand_seed):
    set_seed(rand_seed)
    chart = Chart.from_coordinates(["x", "y", "z"])
    X, Y = _random_tensor(chart, 1, 0), _random_tensor(chart, 1, 0)
    T = _random_tensor(chart, *rank)
    commutator = lie_derivative(lie_derivative(T, Y), X) - lie_derivative(lie_derivative(T, X), Y)
    assert (lie_derivative(T, lie_bracket(X, Y)) - commutator).is_zero()


def test_lie_derivative_of_metric_is_killing_form(polar):
    chart, g = polar
    rotation = chart.coordinate_vector("th")
    assert lie_derivative(g.g, rotation).is_zero()
    dilation = chart.vector(["r", 0])
    assert (lie_derivative(g.g, dilation) - g.g * 2).is_zero()


def test_exterior_algebra():
    chart = Chart.from_coordinates(["x", "y", "z"])
    eta = chart.covector([0, "x", 0])
    d_eta = exterior_derivative_1form(eta)
    assert d_eta[0, 1] == 1 and d_eta[1, 0] == -1
    assert exterior_derivative_2form(d_eta).is_zero()
    Phi = TensorField.from_array(chart, 0, 2, [[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
    wedge = wedge_1_2(chart.coordinate_form("z"), Phi)
    assert wedge[2, 0, 1] == 1 and wedge[0, 1, 2] == 1
    with pytest.raises(SlotError):
        exterior_derivative_1form(Phi)


def test_gradient(polar):
    chart, g = polar
    grad = gradient(chart.scalar("r^2*th"), g)
    assert grad[0] == chart.scalar("2*r*th")
    assert grad[1] == 1


def test_evaluate_and_rank(polar):
    chart, g = polar
    values = g.g.evaluate({"r": 2, "th": 0})
    assert values[1, 1] == 4
    assert matrix_rank_at(g.g, {"r": 2, "th": 0}) == 2
    assert matrix_rank_at(g.g, {"r": 0, "th": 0}) == 1


def test_positive_definite(polar):
    chart, g = polar
    verdict = check_positive_definite(g, [{"r": 1, "th": 0}, {"r": Fraction(1, 2), "th": 3}])
    assert verdict.passed
    lorentz = MetricField.from_tensor(TensorField.from_entries(chart, 0, 2, {(0, 0): -1, (1, 1): 1}))
    verdict = check_positive_definite(lorentz, [{"r": 1, "th": 0}])
    assert not verdict.passed
    assert "leading minor 1" in verdict.notes[0]


def test_positive_definite_skips_poles():
    chart = Chart.from_coordinates(["x", "y"])
    g = MetricField.from_tensor(TensorField.from_entries(chart, 0, 2, {(0, 0): "1/x^2", (1, 1): 1}))
    with pytest.warns(UserWarning, match="skipping"):
        verdict = check_positive_definite(g, [{"x": 0, "y": 0}])
    assert not verdict.passed
    assert verdict.notes == ["no usable sample point"]


if __name__ == "__main__":
    pytest.main(["-x", __file__])
