"""Builders for concrete Kenmotsu manifolds"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from kenmo.base import StructureError
from kenmo.contact.structures import AlmostContactStructure, structure_from_frame
from kenmo.curvature import CurvatureTable, christoffel, covariant_derivative
from kenmo.symbolic import ExprContext, lift_expr
from kenmo.tensors import Chart, MetricField, TensorField, _sum


def rotation_complex_structure(chart: Chart, pairs: Sequence[tuple[int, int]]) -> TensorField:
    """``J∂_a = ∂_b`` and ``J∂_b = −∂_a`` for every coordinate pair ``(a, b)``"""
    entries = {}
    for a, b in pairs:
        entries[(b, a)] = 1
        entries[(a, b)] = -1
    return TensorField.from_entries(chart, 1, 1, entries)


def check_kahler(g_N: MetricField, J: TensorField) -> None:
    """Require ``J² = −I``, ``g(JX, JY) = g(X, Y)`` and ``∇J = 0``

    Raises
    ------
    StructureError
        Naming the first failing condition and its witness
    """
    chart = g_N.chart
    n = chart.dimension
    zero = chart.context.zero
    if n % 2:
        raise StructureError(f"a Kähler factor has even dimension, got {n}")
    J2 = TensorField.from_function(
        chart, 1, 1, lambda a, b: _sum((J[a, c] * J[c, b] for c in range(n)), zero)
    )
    witness = (J2 + chart.identity()).first_nonzero()
    if witness is not None:
        raise StructureError(f"J^2 != -I: (J^2 + I){witness.describe()}")
    g = g_N.g
    compat = TensorField.from_function(
        chart,
        0,
        2,
        lambda a, b: _sum(
            (g[c, d] * J[c, a] * J[d, b] for c in range(n) for d in range(n)), zero
        )
        - g[a, b],
    )
    witness = compat.first_nonzero()
    if witness is not None:
        raise StructureError(f"metric is not J-invariant: {witness.describe()}")
    witness = covariant_derivative(J, christoffel(g_N)).first_nonzero()
    if witness is not None:
        raise StructureError(f"J is not parallel: (nabla J){witness.describe()}")


def build_warped_kenmotsu(
    g_N: MetricField, J: TensorField, c=1, time_coordinate: str = "t"
) -> tuple[Chart, AlmostContactStructure]:
    """Warped product ``ℝ ×_f N`` with ``f(t) = c·e^t`` over a Kähler factor.

    The chart is ``(t, factor coordinates)`` with
    ``g = dt² + c²e^{2t} g_N``, ``ξ = ∂_t``, ``η = dt`` and ``φ`` the lift of
    ``J`` (``φ∂_t = 0``).

    Parameters
    ----------
    g_N : MetricField
        Factor metric on ``2n`` coordinates
    J : TensorField
        Complex structure of the factor, a (1,1) tensor on the same chart
    c : rational, optional
        Positive warping constant, by default 1
    time_coordinate : str, optional
        Name of the line coordinate, by default "t"

    Raises
    ------
    StructureError
        If ``c <= 0`` or the factor fails the Kähler checks
    """
    c = Fraction(c)
    if c <= 0:
        raise StructureError(f"warping constant must be positive, got {c}")
    check_kahler(g_N, J)
    factor = g_N.chart.context
    if time_coordinate in factor.coordinates:
        raise StructureError(f"{time_coordinate!r} is already a factor coordinate")
    coordinates = (time_coordinate,) + factor.coordinates
    t_form = (1,) + (0,) * factor.dimension
    generators = [t_form] + [(0,) + tuple(form) for form in factor.exp_generators]
    chart = Chart(ExprContext(coordinates, generators))
    ctx = chart.context
    w2 = ctx.exp(tuple(2 * a for a in t_form)) * (c * c)

    def metric(i, j):
        if i == 0 or j == 0:
            return 1 if i == j else 0
        return w2 * lift_expr(g_N.g[i - 1, j - 1], ctx)

    def phi(a, b):
        if a == 0 or b == 0:
            return 0
        return lift_expr(J[a - 1, b - 1], ctx)

    g = MetricField.from_tensor(TensorField.from_function(chart, 0, 2, metric))
    structure = AlmostContactStructure(
        TensorField.from_function(chart, 1, 1, phi),
        chart.coordinate_vector(0),
        chart.coordinate_form(0),
        g,
    )
    return chart, structure


def flat_factor(coordinates: Sequence[str]) -> tuple[MetricField, TensorField]:
    """Flat ``ℂ^n`` on ``(x1, y1, x2, y2, ...)`` with the standard ``J``"""
    chart = Chart.from_coordinates(coordinates)
    g = MetricField.from_tensor(_delta(chart))
    J = rotation_complex_structure(
        chart, [(2 * k, 2 * k + 1) for k in range(len(coordinates) // 2)]
    )
    return g, J


def _delta(chart: Chart) -> TensorField:
    return TensorField.from_entries(chart, 0, 2, {(i, i): 1 for i in range(chart.dimension)})


def product_kahler_factor(
    blocks: Sequence[str], coordinates: Sequence[str]
) -> tuple[MetricField, TensorField]:
    """Block-diagonal Kähler metric from one 2×2 conformal block per complex dimension.

    ``blocks[k]`` holds the conformal factor text of block ``k`` (the metric is
    ``h_k (dx_k² + dy_k²)``) and must depend only on that block's coordinates
    for the product to be Kähler; this is verified by :func:`check_kahler`
    when the factor is used.
    """
    chart = Chart.from_coordinates(coordinates)
    if 2 * len(blocks) != chart.dimension:
        raise StructureError(f"{len(blocks)} blocks for {chart.dimension} coordinates")
    entries = {}
    for k, factor in enumerate(blocks):
        h = chart.scalar(factor)
        entries[(2 * k, 2 * k)] = h
        entries[(2 * k + 1, 2 * k + 1)] = h
    g = MetricField.from_tensor(TensorField.from_entries(chart, 0, 2, entries))
    J = rotation_complex_structure(chart, [(2 * k, 2 * k + 1) for k in range(len(blocks))])
    return g, J


M5_COORDINATES = ("x", "y", "z", "u", "v")


def m5_frame(chart: Chart) -> list[TensorField]:
    """``e_a = v∂_a`` for ``a = x, y, z, u`` and ``e_5 = −v∂_v``"""
    v = chart.scalar("v")
    frame = [chart.coordinate_vector(i) * v for i in range(4)]
    frame.append(chart.coordinate_vector(4) * (-v))
    return frame


def builtin_example_m5() -> tuple[Chart, AlmostContactStructure]:
    """The Kenmotsu structure on ``{(x, y, z, u, v) : v > 0}`` with
    ``g = v⁻²δ``, ``ξ = −v∂_v``, ``η = −(1/v)dv`` and
    ``φe_1 = e_2, φe_2 = −e_1, φe_3 = e_4, φe_4 = −e_3, φe_5 = 0``"""
    chart = Chart.from_coordinates(M5_COORDINATES)
    inv_v2 = chart.scalar("1/v^2")
    g = MetricField.from_tensor(
        TensorField.from_entries(chart, 0, 2, {(i, i): inv_v2 for i in range(5)})
    )
    phi_images = [{1: 1}, {0: -1}, {3: 1}, {2: -1}, {}]
    return chart, structure_from_frame(chart, g, m5_frame(chart), phi_images, reeb_index=4)


M5_CURVATURE_TABLE: CurvatureTable = [
    ((1, 2, 1), {2: 1}),
    ((1, 2, 2), {1: -1}),
    ((1, 3, 1), {3: 1}),
    ((1, 3, 3), {1: -1}),
    ((1, 4, 1), {4: 1}),
    ((1, 4, 4), {1: -1}),
    ((1, 5, 1), {5: 1}),
    ((1, 5, 2), {5: 1}),
    ((1, 5, 5), {1: 1}),
    ((2, 3, 2), {3: 1}),
    ((2, 3, 3), {2: -1}),
    ((2, 4, 2), {4: 1}),
    ((2, 4, 2), {3: -1}),
    ((2, 5, 5), {2: -1}),
    ((3, 4, 3), {4: 1}),
    ((3, 4, 4), {3: -1}),
    ((3, 5, 3), {5: 1}),
    ((3, 5, 5), {3: -1}),
    ((4, 5, 4), {5: 1}),
    ((4, 5, 4), {5: -1}),
]
"""The published frame curvature table of the 5-dimensional example, as printed"""
