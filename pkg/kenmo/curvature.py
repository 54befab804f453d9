"""Levi-Civita connection, covariant derivatives and curvature.

Index layout, used everywhere in the package:

* ``Γ[k, i, j] = Γ^k_{ij}`` with ``∇_{∂_i} ∂_j = Γ^k_{ij} ∂_k``
* ``R[l, i, j, k]`` is the ``∂_l`` component of ``R(∂_i, ∂_j)∂_k`` with
  ``R(X, Y)Z = ∇_X ∇_Y Z − ∇_Y ∇_X Z − ∇_{[X,Y]} Z``
* ``Ric[j, k] = Σ_i R[i, i, j, k]``, ``Q[a, b] = g^{ac} Ric[c, b]``, ``r = Q[a, a]``
* covariant derivatives append the derivative slot last:
  ``(∇T)[..., m] = (∇_{∂_m} T)[...]``
* ``(L_V∇)[k, i, j]`` is the ``∂_k`` component of ``(L_V∇)(∂_i, ∂_j)``
"""

from __future__ import annotations

import warnings
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np
from attrs import define, field
from jaxtyping import Shaped
from sympy.polys.matrices import DomainMatrix

from kenmo.base import (
    DegeneratePlaneError,
    KenmoError,
    ReferenceTableWarning,
    StructureError,
    VerdictReport,
)
from kenmo.symbolic import ScalarExpr, differentiate, is_zero
from kenmo.tensors import (
    Chart,
    MetricField,
    TensorField,
    _check_chart,
    _check_vector,
    _partials,
    _sum,
    contract,
    differential,
    directional_derivative,
    lie_derivative,
    raise_index,
)
from kenmo.utilities import build_components


@define(frozen=True, eq=False)
class Connection:
    """Affine connection given by its Christoffel symbols in the chart basis"""

    chart: Chart
    christoffel: Shaped[np.ndarray, "k i j"] = field(repr=False)
    """``christoffel[k, i, j] = Γ^k_{ij}``"""
    metric: Optional[MetricField] = field(default=None, repr=False)
    """The metric this is the Levi-Civita connection of, if any"""

    @christoffel.validator
    def _check_shape(self, attribute, value):
        n = self.chart.dimension
        if value.shape != (n, n, n):
            raise ValueError(f"Christoffel array has shape {value.shape}, expected {(n, n, n)}")

    def as_tensor(self) -> TensorField:
        """The symbols packed in a (1,2) array; not a tensor under chart changes"""
        return TensorField(self.chart, 1, 2, self.christoffel)


@define(frozen=True, eq=False)
class CurvatureBundle:
    """Riemann, Ricci and scalar curvature of a Levi-Civita connection"""

    riemann: TensorField = field(repr=False)
    """(1,3) tensor ``R[l, i, j, k]``"""
    ricci: TensorField = field(repr=False)
    """(0,2) Ricci tensor"""
    ricci_operator: TensorField = field(repr=False)
    """(1,1) Ricci operator ``Q`` with ``Ric(X, Y) = g(QX, Y)``"""
    scalar: ScalarExpr
    """Scalar curvature ``r``"""
    connection: Connection = field(repr=False)

    @property
    def chart(self) -> Chart:
        return self.riemann.chart

    @property
    def metric(self) -> MetricField:
        return self.connection.metric


def christoffel(g: MetricField) -> Connection:
    """Levi-Civita connection of `g` from the Koszul formula

    ``Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})``
    """
    chart = g.chart
    n = chart.dimension
    dg = _partials(g.g)
    half = Fraction(1, 2)
    # first kind: [ij, l]
    first = build_components(
        n, 3, lambda i, j, l: (dg[j, l, i] + dg[i, l, j] - dg[i, j, l]) * half
    )
    zero = chart.context.zero
    symbols = build_components(
        n, 3, lambda k, i, j: _sum((g.g_inv[k, l] * first[i, j, l] for l in range(n)), zero)
    )
    return Connection(chart, symbols, g)


def covariant_derivative(T: TensorField, conn: Connection) -> TensorField:
    """``∇T`` with the derivative slot appended as the last covariant slot"""
    _check_chart(T, conn.as_tensor())
    p, q, n = T.contravariant_rank, T.covariant_rank, T.dimension
    dT = _partials(T)
    G = conn.christoffel

    def component(*index):
        base, m = index[:-1], index[-1]
        total = dT[index]
        for s in range(p):
            for r in range(n):
                total = total + G[base[s], m, r] * T.components[base[:s] + (r,) + base[s + 1 :]]
        for s in range(p, p + q):
            for r in range(n):
                total = total - G[r, m, base[s]] * T.components[base[:s] + (r,) + base[s + 1 :]]
        return total

    return TensorField.from_function(T.chart, p, q + 1, component)


def covariant_derivative_along(X: TensorField, Y: TensorField, conn: Connection) -> TensorField:
    """The vector field ``∇_X Y``"""
    _check_vector(X)
    _check_vector(Y)
    nabla_Y = covariant_derivative(Y, conn)
    return nabla_Y.apply(X)


def riemann(conn: Connection) -> CurvatureBundle:
    """Curvature of a Levi-Civita connection

    Raises
    ------
    ValueError
        If `conn` carries no metric (Q and r need one)
    """
    if conn.metric is None:
        raise ValueError("Ricci operator and scalar curvature need the connection's metric")
    chart = conn.chart
    n = chart.dimension
    zero = chart.context.zero
    G = conn.christoffel
    dG = _partials(conn.as_tensor())

    def component(l, i, j, k):
        total = dG[l, j, k, i] - dG[l, i, k, j]
        return total + _sum(
            (G[l, i, m] * G[m, j, k] - G[l, j, m] * G[m, i, k] for m in range(n)), zero
        )

    R = TensorField.from_function(chart, 1, 3, component)
    ricci = contract(R, 0, 0)
    Q = raise_index(ricci, 0, conn.metric, position=0)
    scalar = contract(Q, 0, 0).scalar()
    return CurvatureBundle(R, ricci, Q, scalar, conn)


def sectional_curvature(
    X: TensorField, Y: TensorField, bundle: CurvatureBundle, g: MetricField
) -> ScalarExpr:
    """``K(X, Y) = g(R(X,Y)Y, X) / (g(X,X)g(Y,Y) − g(X,Y)²)``

    Raises
    ------
    DegeneratePlaneError
        If the denominator is the zero expression
    """
    _check_chart(X, Y, bundle.riemann, g.g)
    denominator = g.inner(X, X) * g.inner(Y, Y) - g.inner(X, Y) ** 2
    if is_zero(denominator):
        raise DegeneratePlaneError("X and Y do not span a plane")
    RXYY = bundle.riemann.apply(X, Y, Y)
    return g.inner(RXYY, X) / denominator


def hessian(f: ScalarExpr, conn: Connection) -> TensorField:
    """``Hess f = ∇df``"""
    return covariant_derivative(differential(f, conn.chart), conn)


def lie_derivative_connection(V: TensorField, conn: Connection) -> TensorField:
    """The (1,2) tensor ``(L_V∇)(X, Y) = L_V ∇_X Y − ∇_X L_V Y − ∇_{[V,X]} Y``

    In components::

        (L_V∇)^k_{ij} = ∂_i∂_j V^k + V^m ∂_m Γ^k_{ij} − Γ^m_{ij} ∂_m V^k
                        + Γ^k_{mj} ∂_i V^m + Γ^k_{im} ∂_j V^m
    """
    _check_vector(V)
    _check_chart(V, conn.as_tensor())
    n = V.dimension
    zero = V.context.zero
    G = conn.christoffel
    dG = _partials(conn.as_tensor())
    dV = _partials(V)
    coords = V.chart.coordinates

    def component(k, i, j):
        total = differentiate(dV[k, j], coords[i])
        return total + _sum(
            (
                V[m] * dG[k, i, j, m]
                - G[m, i, j] * dV[k, m]
                + G[k, m, j] * dV[m, i]
                + G[k, i, m] * dV[m, j]
                for m in range(n)
            ),
            zero,
        )

    return TensorField.from_function(V.chart, 1, 2, component)


def _second_commutation(V: TensorField, conn: Connection) -> TensorField:
    D = covariant_derivative(lie_derivative_connection(V, conn), conn)
    return TensorField.from_function(
        V.chart, 1, 3, lambda l, i, j, k: D[l, j, k, i] - D[l, i, k, j]
    )


def lie_derivative_curvature(
    V: TensorField, bundle: CurvatureBundle, cross_check: bool = False
) -> TensorField:
    """``L_V R`` as a tensor Lie derivative

    Parameters
    ----------
    V : TensorField
        (1,0) vector field
    bundle : CurvatureBundle
        Curvature of the Levi-Civita connection
    cross_check : bool, optional
        Also compute ``(∇_X L_V∇)(Y,Z) − (∇_Y L_V∇)(X,Z)`` and require it to
        agree, by default False

    Raises
    ------
    KenmoError
        If the cross-check disagrees
    """
    LR = lie_derivative(bundle.riemann, V)
    if cross_check:
        mismatch = (LR - _second_commutation(V, bundle.connection)).first_nonzero()
        if mismatch is not None:
            raise KenmoError(
                f"L_V R disagrees with the commutation formula at {mismatch.describe()}"
            )
    return LR


# property checks --------------------------------------------------------------


def check_connection_properties(conn: Connection, g: MetricField) -> list[VerdictReport]:
    """Torsion-freeness and metric compatibility"""
    G = conn.christoffel
    torsion = TensorField.from_function(
        conn.chart, 1, 2, lambda k, i, j: G[k, i, j] - G[k, j, i]
    )
    return [
        VerdictReport.from_residual("torsion_free", torsion),
        VerdictReport.from_residual("metric_compatible", covariant_derivative(g.g, conn)),
    ]


def check_curvature_properties(
    bundle: CurvatureBundle, g: MetricField, conn: Connection
) -> list[VerdictReport]:
    """Symmetries of R, Ricci and Q plus the contracted Bianchi trace identity"""
    R = bundle.riemann
    chart = R.chart
    antisymmetry = TensorField.from_function(
        chart, 1, 3, lambda l, i, j, k: R[l, i, j, k] + R[l, j, i, k]
    )
    bianchi = TensorField.from_function(
        chart, 1, 3, lambda l, i, j, k: R[l, i, j, k] + R[l, j, k, i] + R[l, k, i, j]
    )
    ric = bundle.ricci
    ricci_symmetry = ric - ric.permute_covariant([1, 0])
    n = chart.dimension
    zero = chart.context.zero
    Q = bundle.ricci_operator
    lowered = TensorField.from_function(
        chart, 0, 2, lambda a, b: _sum((g.g[a, c] * Q[c, b] for c in range(n)), zero)
    )
    self_adjoint = lowered - lowered.permute_covariant([1, 0])
    trace_g_ric = _sum(
        (g.g_inv[j, k] * ric[j, k] for j in range(n) for k in range(n)), zero
    )
    scalar_trace = chart.constant_scalar(trace_g_ric - bundle.scalar)
    return [
        VerdictReport.from_residual("riemann_antisymmetry", antisymmetry),
        VerdictReport.from_residual("first_bianchi", bianchi),
        VerdictReport.from_residual("ricci_symmetry", ricci_symmetry),
        VerdictReport.from_residual("ricci_operator_self_adjoint", self_adjoint),
        VerdictReport.from_residual("scalar_is_metric_trace", scalar_trace),
        VerdictReport.from_residual("contracted_bianchi", contracted_bianchi_residual(bundle, conn)),
    ]


def contracted_bianchi_residual(bundle: CurvatureBundle, conn: Connection) -> TensorField:
    """``trace{X → (∇_X Q)Y} − ½ Y(r)`` as a (0,1) tensor in ``Y``"""
    chart = bundle.chart
    n = chart.dimension
    zero = chart.context.zero
    dQ = covariant_derivative(bundle.ricci_operator, conn)
    dr = differential(bundle.scalar, chart)
    half = Fraction(1, 2)
    return TensorField.from_function(
        chart, 0, 1, lambda b: _sum((dQ[a, b, a] for a in range(n)), zero) - dr[b] * half
    )


def check_commutation_formula(V: TensorField, g: MetricField, conn: Connection) -> VerdictReport:
    """``g((L_V∇)(Z,X),Y) + g((L_V∇)(Z,Y),X) = (∇_Z L_V g)(X,Y)``

    The residual is indexed ``[Z, X, Y]``.
    """
    C = lie_derivative_connection(V, conn)
    D = covariant_derivative(lie_derivative(g.g, V), conn)
    n = V.dimension
    zero = V.context.zero

    def component(m, a, b):
        lhs = _sum((g.g[k, b] * C[k, m, a] + g.g[k, a] * C[k, m, b] for k in range(n)), zero)
        return lhs - D[a, b, m]

    residual = TensorField.from_function(V.chart, 0, 3, component)
    return VerdictReport.from_residual("lie_connection_commutation", residual)


def check_second_commutation_formula(V: TensorField, bundle: CurvatureBundle) -> VerdictReport:
    """``(L_V R)(X,Y)Z = (∇_X L_V∇)(Y,Z) − (∇_Y L_V∇)(X,Z)``"""
    residual = lie_derivative(bundle.riemann, V) - _second_commutation(V, bundle.connection)
    return VerdictReport.from_residual("lie_curvature_commutation", residual)


def _kulkarni_unit(g: MetricField) -> TensorField:
    """``g(Y,Z)X − g(X,Z)Y`` in the Riemann index layout"""
    delta = g.chart.identity()
    return TensorField.from_function(
        g.chart,
        1,
        3,
        lambda l, i, j, k: g.g[j, k] * delta[l, i] - g.g[i, k] * delta[l, j],
    )


def space_form_residual(bundle: CurvatureBundle, g: MetricField, K) -> TensorField:
    """``R(X,Y)Z − K(g(Y,Z)X − g(X,Z)Y)``"""
    return bundle.riemann - _kulkarni_unit(g) * K


def check_three_dim_decomposition(bundle: CurvatureBundle, g: MetricField) -> VerdictReport:
    """Curvature of a 3-manifold is determined by its Ricci tensor::

        R(X,Y)Z = g(Y,Z)QX − g(X,Z)QY + g(QY,Z)X − g(QX,Z)Y
                  − r/2 (g(Y,Z)X − g(X,Z)Y)

    Raises
    ------
    StructureError
        If the dimension is not 3
    """
    chart = bundle.chart
    if chart.dimension != 3:
        raise StructureError(
            f"the Ricci decomposition of curvature holds in dimension 3, not {chart.dimension}"
        )
    Q = bundle.ricci_operator
    ric = bundle.ricci
    delta = chart.identity()
    half_r = bundle.scalar * Fraction(1, 2)

    def component(l, i, j, k):
        return (
            g.g[j, k] * Q[l, i]
            - g.g[i, k] * Q[l, j]
            + ric[j, k] * delta[l, i]
            - ric[i, k] * delta[l, j]
            - half_r * (g.g[j, k] * delta[l, i] - g.g[i, k] * delta[l, j])
        )

    residual = bundle.riemann - TensorField.from_function(chart, 1, 3, component)
    return VerdictReport.from_residual("three_dim_decomposition", residual)


# frames -----------------------------------------------------------------------


def frame_components(T: TensorField, frame: Sequence[TensorField]) -> TensorField:
    """Components of `T` in a frame ``e_0, ..., e_{n-1}`` of vector fields.

    The returned array is indexed by frame indices in the same slot layout:
    ``out[a, b] = θ^a(T(e_b))`` for a (1,1) tensor, where ``θ`` is the dual
    coframe.

    Raises
    ------
    ValueError
        If `frame` does not have one vector per dimension or is degenerate
    """
    chart = T.chart
    n = chart.dimension
    if len(frame) != n:
        raise ValueError(f"a frame needs {n} vector fields, got {len(frame)}")
    for e in frame:
        _check_vector(e, "frame vector")
        _check_chart(T, e)
    # E[i, a] = e_a^i; coframe = E^{-1}
    E = TensorField.from_function(chart, 1, 1, lambda i, a: frame[a][i])
    try:
        theta = _matrix_inverse(E)
    except ZeroDivisionError:
        raise ValueError("frame vectors are linearly dependent") from None
    p, q = T.contravariant_rank, T.covariant_rank
    out = T
    zero = chart.context.zero
    # transform one slot at a time
    for s in range(p):
        prev = out
        out = TensorField.from_function(
            chart,
            p,
            q,
            lambda *index, s=s, prev=prev: _sum(
                (theta[index[s], i] * prev.components[index[:s] + (i,) + index[s + 1 :]] for i in range(n)),
                zero,
            ),
        )
    for s in range(p, p + q):
        prev = out
        out = TensorField.from_function(
            chart,
            p,
            q,
            lambda *index, s=s, prev=prev: _sum(
                (prev.components[index[:s] + (i,) + index[s + 1 :]] * E[i, index[s]] for i in range(n)),
                zero,
            ),
        )
    return out


def _matrix_inverse(E: TensorField) -> Shaped[np.ndarray, "a i"]:
    ctx = E.context
    K = ctx.fraction_field
    n = E.dimension
    matrix = DomainMatrix(
        [[E[i, a].frac for a in range(n)] for i in range(n)], (n, n), K.to_domain()
    )
    if not matrix.det():
        raise ZeroDivisionError("singular frame")
    inverse = matrix.inv().to_list()
    return build_components(n, 2, lambda a, i: ScalarExpr(ctx, K(inverse[a][i])))


CurvatureTable = Sequence[tuple[tuple[int, int, int], Mapping[int, int]]]
"""Entries ``((i, j, k), {a: c})`` meaning ``R(e_i, e_j)e_k = Σ c e_a``, 1-based frame
labels; a printed table may list the same ``(i, j, k)`` more than once"""


def compare_curvature_table(
    bundle: CurvatureBundle, frame: Sequence[TensorField], table: CurvatureTable
) -> VerdictReport:
    """Compare recomputed frame curvature against a reference table.

    Each disagreeing entry is reported in the verdict notes and with a
    :class:`~kenmo.base.ReferenceTableWarning`; the recomputed value is the one
    listed as ``computed``.
    """
    Rf = frame_components(bundle.riemann, frame)
    n = len(frame)
    notes = []
    for (i, j, k), expected in table:
        computed = {a + 1: Rf[a, i - 1, j - 1, k - 1] for a in range(n)}
        if all(computed[a] == expected.get(a, 0) for a in computed):
            continue
        message = (
            f"R(e{i},e{j})e{k}: table {_format_frame_vector(expected)}, "
            f"computed {_format_frame_vector(computed)}"
        )
        notes.append(message)
        warnings.warn(message, ReferenceTableWarning)
    return VerdictReport("curvature_table", not notes, notes=notes)


def _format_frame_vector(coefficients: Mapping[int, object]) -> str:
    parts = []
    for a in sorted(coefficients):
        c = coefficients[a]
        if c == 0:
            continue
        text = str(c)
        if text == "1":
            parts.append(f"e{a}")
        elif text == "-1":
            parts.append(f"-e{a}")
        else:
            parts.append(f"({text})*e{a}")
    if not parts:
        return "0"
    return " + ".join(parts).replace("+ -", "- ")


def frame_curvature_entries(
    bundle: CurvatureBundle, frame: Sequence[TensorField]
) -> list[tuple[tuple[int, int, int], str]]:
    """Nonzero ``R(e_i, e_j)e_k`` with ``i < j``, 1-based labels, as printable vectors"""
    Rf = frame_components(bundle.riemann, frame)
    n = len(frame)
    entries = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                vec = {a + 1: Rf[a, i, j, k] for a in range(n)}
                if any(not is_zero(v) for v in vec.values()):
                    entries.append(((i + 1, j + 1, k + 1), _format_frame_vector(vec)))
    return entries


def scalar_is_reeb_invariant(bundle: CurvatureBundle, xi: TensorField) -> ScalarExpr:
    """``ξ(r)``"""
    return directional_derivative(bundle.scalar, xi)
