"""Charts, tensor fields in the coordinate basis and metric bookkeeping.

Component arrays store contravariant axes first, then covariant axes, so a
(1,2) tensor ``T`` has ``T.components[k, i, j] = T^k_{ij}``. Every component
is a :class:`~kenmo.symbolic.ScalarExpr` over the chart's context.
"""

from __future__ import annotations

import warnings
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence, Union

import mpmath
import numpy as np
from attrs import define, field
from jaxtyping import Shaped
from sympy.polys.matrices import DomainMatrix

from kenmo.base import (
    ChartMismatchError,
    ExactEvaluationError,
    PoleError,
    SamplePointSkippedWarning,
    SingularMetricError,
    SlotError,
    VerdictReport,
    Witness,
)
from kenmo.symbolic import (
    ExprContext,
    ScalarExpr,
    differentiate,
    evaluate,
    is_zero,
    parse_expr,
)
from kenmo.utilities import build_components, exact_rank, leading_minors

ScalarLike = Union[ScalarExpr, int, Fraction, str]


@define(frozen=True)
class Chart:
    """A single coordinate chart; everything is expressed in its coordinate basis"""

    context: ExprContext

    @classmethod
    def from_coordinates(
        cls, coordinates: Sequence[str], exp_generators: Sequence[Sequence] = ()
    ) -> Chart:
        return cls(ExprContext(tuple(coordinates), exp_generators))

    @property
    def dimension(self) -> int:
        return self.context.dimension

    @property
    def coordinates(self) -> tuple[str, ...]:
        return self.context.coordinates

    def scalar(self, value: ScalarLike) -> ScalarExpr:
        """Coerce `value` (expression, rational or expression text) to a ScalarExpr"""
        if isinstance(value, ScalarExpr):
            if value.ctx != self.context:
                raise ChartMismatchError(
                    f"expression over {value.ctx.coordinates} used on chart {self.coordinates}"
                )
            return value
        if isinstance(value, str):
            return parse_expr(value, self.context)
        return self.context.constant(Fraction(value))

    def _index(self, coord: Union[int, str]) -> int:
        if isinstance(coord, str):
            return self.context.index(coord)
        if not 0 <= coord < self.dimension:
            raise SlotError(f"coordinate index {coord} out of range for dimension {self.dimension}")
        return coord

    def coordinate_vector(self, coord: Union[int, str]) -> TensorField:
        """∂_i as a (1,0) tensor"""
        i = self._index(coord)
        return TensorField.from_entries(self, 1, 0, {(i,): 1})

    def coordinate_form(self, coord: Union[int, str]) -> TensorField:
        """dx^i as a (0,1) tensor"""
        i = self._index(coord)
        return TensorField.from_entries(self, 0, 1, {(i,): 1})

    def identity(self) -> TensorField:
        """Kronecker δ^i_j as a (1,1) tensor"""
        return TensorField.from_entries(self, 1, 1, {(i, i): 1 for i in range(self.dimension)})

    def vector(self, components: Sequence[ScalarLike]) -> TensorField:
        return TensorField.from_array(self, 1, 0, components)

    def covector(self, components: Sequence[ScalarLike]) -> TensorField:
        return TensorField.from_array(self, 0, 1, components)

    def constant_scalar(self, value: ScalarLike) -> TensorField:
        """`value` as a rank-(0,0) tensor"""
        return TensorField.from_array(self, 0, 0, value)

    def zeros(self, contravariant_rank: int, covariant_rank: int) -> TensorField:
        return TensorField.from_entries(self, contravariant_rank, covariant_rank, {})


@define(eq=False)
class TensorField:
    """Rank-(p, q) tensor field with dense symbolic components"""

    chart: Chart
    contravariant_rank: int = field()
    covariant_rank: int = field()
    components: Shaped[np.ndarray, "..."] = field(repr=False)
    """Object array of shape ``(dimension,) * (p + q)``, upper axes first"""

    @contravariant_rank.validator
    @covariant_rank.validator
    def _check_rank(self, attribute, value):
        if value < 0:
            raise ValueError(f"{attribute.name} must be nonnegative, got {value}")

    @components.validator
    def _check_components(self, attribute, value):
        shape = (self.chart.dimension,) * self.rank
        if value.shape != shape:
            raise ValueError(f"components have shape {value.shape}, expected {shape}")
        for comp in value.flat:
            if not isinstance(comp, ScalarExpr):
                raise ValueError(f"component {comp!r} is not a ScalarExpr")
            if comp.ctx != self.chart.context:
                raise ChartMismatchError("component context differs from the chart's")

    @classmethod
    def from_function(
        cls,
        chart: Chart,
        contravariant_rank: int,
        covariant_rank: int,
        component: Callable[..., ScalarLike],
    ) -> TensorField:
        """Tensor whose component at ``(i, j, ...)`` is ``component(i, j, ...)``"""
        arr = build_components(
            chart.dimension,
            contravariant_rank + covariant_rank,
            lambda *index: chart.scalar(component(*index)),
        )
        return cls(chart, contravariant_rank, covariant_rank, arr)

    @classmethod
    def from_array(
        cls, chart: Chart, contravariant_rank: int, covariant_rank: int, values: Any
    ) -> TensorField:
        """Tensor from a nested sequence of expressions, rationals or expression texts"""
        n_slots = contravariant_rank + covariant_rank
        if n_slots == 0:
            return cls.from_function(chart, 0, 0, lambda: values)
        raw = np.empty((chart.dimension,) * n_slots, dtype=object)
        try:
            for index in np.ndindex(*raw.shape):
                item = values
                for i in index:
                    item = item[i]
                raw[index] = item
        except (IndexError, TypeError):
            raise ValueError(
                f"values do not form a {'x'.join([str(chart.dimension)] * n_slots)} array"
            ) from None
        return cls.from_function(
            chart, contravariant_rank, covariant_rank, lambda *index: raw[index]
        )

    @classmethod
    def from_entries(
        cls,
        chart: Chart,
        contravariant_rank: int,
        covariant_rank: int,
        entries: Mapping[tuple[int, ...], ScalarLike],
    ) -> TensorField:
        """Tensor that is zero except at the given indices"""
        zero = chart.context.zero
        return cls.from_function(
            chart,
            contravariant_rank,
            covariant_rank,
            lambda *index: entries.get(index, zero),
        )

    @property
    def rank(self) -> int:
        return self.contravariant_rank + self.covariant_rank

    @property
    def dimension(self) -> int:
        return self.chart.dimension

    @property
    def context(self) -> ExprContext:
        return self.chart.context

    def __getitem__(self, index) -> ScalarExpr:
        if not isinstance(index, tuple):
            index = (index,)
        return self.components[index]

    def scalar(self) -> ScalarExpr:
        """The single component of a rank-(0,0) tensor"""
        if self.rank != 0:
            raise SlotError(f"tensor of rank ({self.contravariant_rank},{self.covariant_rank}) is not a scalar")
        return self.components[()]

    def _same_kind(self, other: TensorField):
        _check_chart(self, other)
        if (self.contravariant_rank, self.covariant_rank) != (
            other.contravariant_rank,
            other.covariant_rank,
        ):
            raise SlotError(
                f"cannot combine rank ({self.contravariant_rank},{self.covariant_rank}) "
                f"with rank ({other.contravariant_rank},{other.covariant_rank})"
            )

    def _map(self, fn: Callable[..., ScalarExpr], *others: TensorField) -> TensorField:
        return TensorField.from_function(
            self.chart,
            self.contravariant_rank,
            self.covariant_rank,
            lambda *index: fn(self.components[index], *(o.components[index] for o in others)),
        )

    def __add__(self, other: TensorField) -> TensorField:
        if not isinstance(other, TensorField):
            return NotImplemented
        self._same_kind(other)
        return self._map(lambda a, b: a + b, other)

    def __sub__(self, other: TensorField) -> TensorField:
        if not isinstance(other, TensorField):
            return NotImplemented
        self._same_kind(other)
        return self._map(lambda a, b: a - b, other)

    def __neg__(self) -> TensorField:
        return self._map(lambda a: -a)

    def __mul__(self, factor: ScalarLike) -> TensorField:
        if isinstance(factor, TensorField):
            return NotImplemented
        s = self.chart.scalar(factor)
        return self._map(lambda a: a * s)

    __rmul__ = __mul__

    def __truediv__(self, factor: ScalarLike) -> TensorField:
        s = self.chart.scalar(factor)
        inverse = 1 / s
        return self._map(lambda a: a * inverse)

    def labels(self, index: Sequence[int]) -> tuple[str, ...]:
        return tuple(self.chart.coordinates[i] for i in index)

    def first_nonzero(self) -> Optional[Witness]:
        """Witness for the first nonzero component in row-major order"""
        for index in np.ndindex(*self.components.shape):
            value = self.components[index]
            if not is_zero(value):
                return Witness(tuple(int(i) for i in index), value, self.labels(index))
        return None

    def is_zero(self) -> bool:
        return self.first_nonzero() is None

    def nonzero_items(self) -> Iterable[tuple[tuple[int, ...], ScalarExpr]]:
        for index in np.ndindex(*self.components.shape):
            value = self.components[index]
            if not is_zero(value):
                yield tuple(int(i) for i in index), value

    def permute_covariant(self, order: Sequence[int]) -> TensorField:
        """New tensor with covariant slot ``k`` taken from old covariant slot ``order[k]``"""
        p = self.contravariant_rank
        if sorted(order) != list(range(self.covariant_rank)):
            raise SlotError(f"{order} is not a permutation of the covariant slots")
        axes = list(range(p)) + [p + k for k in order]
        arr = np.transpose(self.components, axes).copy()
        return TensorField(self.chart, p, self.covariant_rank, arr)

    def symmetrize(self) -> TensorField:
        """Symmetric part of a (0,2) tensor"""
        if (self.contravariant_rank, self.covariant_rank) != (0, 2):
            raise SlotError("symmetrize expects a (0,2) tensor")
        half = Fraction(1, 2)
        return self._map(lambda a, b: (a + b) * half, self.permute_covariant([1, 0]))

    def apply(self, *vectors: TensorField) -> TensorField:
        """Feed vector fields into the leading covariant slots, in order"""
        if len(vectors) > self.covariant_rank:
            raise SlotError(
                f"{len(vectors)} vectors given for {self.covariant_rank} covariant slots"
            )
        out = self
        for X in vectors:
            if (X.contravariant_rank, X.covariant_rank) != (1, 0):
                raise SlotError("apply expects (1,0) vector fields")
            out = contract(tensor_product(out, X), out.contravariant_rank, 0)
        return out

    def evaluate(
        self, point: Mapping[str, Any], approximate: bool = False, digits: int = 50
    ) -> Shaped[np.ndarray, "..."]:
        """Object array of component values at `point`"""
        out = np.empty(self.components.shape, dtype=object)
        for index in np.ndindex(*out.shape):
            out[index] = evaluate(self.components[index], point, approximate, digits)
        return out


def _check_chart(*tensors: TensorField):
    first = tensors[0].chart
    for T in tensors[1:]:
        if T.chart != first:
            raise ChartMismatchError(
                f"tensors on charts {first.coordinates} and {T.chart.coordinates} cannot be combined"
            )


def _check_vector(X: TensorField, name: str = "vector field"):
    if (X.contravariant_rank, X.covariant_rank) != (1, 0):
        raise SlotError(
            f"{name} must be a (1,0) tensor, got ({X.contravariant_rank},{X.covariant_rank})"
        )


def _sum(terms: Iterable[ScalarExpr], zero: ScalarExpr) -> ScalarExpr:
    total = zero
    for term in terms:
        total = total + term
    return total


def _partials(T: TensorField) -> Shaped[np.ndarray, "..."]:
    """Array with a trailing derivative axis: ``out[..., m] = ∂_m T[...]``"""
    coords = T.chart.coordinates
    return build_components(
        T.dimension,
        T.rank + 1,
        lambda *index: differentiate(T.components[index[:-1]], coords[index[-1]]),
    )


@define(frozen=True, eq=False)
class MetricField:
    """Nondegenerate symmetric (0,2) tensor with its cached inverse and determinant"""

    g: TensorField
    g_inv: TensorField = field(repr=False)
    """The (2,0) inverse ``g^{ij}``"""
    volume_factor: ScalarExpr = field(repr=False)
    """``det g``"""

    @classmethod
    def from_tensor(cls, g: TensorField) -> MetricField:
        """Validate symmetry, then compute the inverse and determinant

        Raises
        ------
        SlotError
            If `g` is not rank (0,2)
        ValueError
            If `g` is not symmetric
        SingularMetricError
            If ``det g`` is the zero expression
        """
        if (g.contravariant_rank, g.covariant_rank) != (0, 2):
            raise SlotError("a metric must be a (0,2) tensor")
        asymmetry = (g - g.permute_covariant([1, 0])).first_nonzero()
        if asymmetry is not None:
            raise ValueError(f"metric is not symmetric: g{asymmetry.describe()} - transpose")
        g_inv, det = _inverse_and_det(g)
        return cls(g, g_inv, det)

    @property
    def chart(self) -> Chart:
        return self.g.chart

    @property
    def dimension(self) -> int:
        return self.g.dimension

    def inner(self, X: TensorField, Y: TensorField) -> ScalarExpr:
        """``g(X, Y)``"""
        return self.g.apply(X, Y).scalar()


def _inverse_and_det(g: TensorField) -> tuple[TensorField, ScalarExpr]:
    ctx = g.context
    K = ctx.fraction_field
    n = g.dimension
    rows = [[g.components[i, j].frac for j in range(n)] for i in range(n)]
    matrix = DomainMatrix(rows, (n, n), K.to_domain())
    det = matrix.det()
    if not det:
        raise SingularMetricError("metric determinant is identically zero")
    inverse = matrix.inv().to_list()
    g_inv = TensorField.from_function(
        g.chart, 2, 0, lambda i, j: ScalarExpr(ctx, K(inverse[i][j]))
    )
    return g_inv, ScalarExpr(ctx, K(det))


def metric_inverse(g: TensorField) -> TensorField:
    """The (2,0) inverse of a symmetric, nondegenerate (0,2) tensor

    Raises
    ------
    SingularMetricError
        If ``det g`` is the zero expression
    """
    return MetricField.from_tensor(g).g_inv


def lie_bracket(X: TensorField, Y: TensorField) -> TensorField:
    """``[X, Y]^k = X^i ∂_i Y^k − Y^i ∂_i X^k``"""
    _check_chart(X, Y)
    _check_vector(X)
    _check_vector(Y)
    coords = X.chart.coordinates
    zero = X.context.zero
    n = X.dimension
    return TensorField.from_function(
        X.chart,
        1,
        0,
        lambda k: _sum(
            (
                X[i] * differentiate(Y[k], coords[i]) - Y[i] * differentiate(X[k], coords[i])
                for i in range(n)
            ),
            zero,
        ),
    )


def directional_derivative(f: ScalarExpr, V: TensorField) -> ScalarExpr:
    """``V(f) = V^i ∂_i f``"""
    _check_vector(V)
    return _sum(
        (V[i] * differentiate(f, c) for i, c in enumerate(V.chart.coordinates)),
        V.context.zero,
    )


def lie_derivative(T: TensorField, V: TensorField) -> TensorField:
    """Lie derivative ``L_V T`` of a tensor field of any rank"""
    _check_chart(T, V)
    _check_vector(V)
    p, q, n = T.contravariant_rank, T.covariant_rank, T.dimension
    zero = T.context.zero
    dT = _partials(T)
    dV = _partials(V)

    def component(*index):
        total = _sum((V[m] * dT[index + (m,)] for m in range(n)), zero)
        for s in range(p):
            for m in range(n):
                replaced = index[:s] + (m,) + index[s + 1 :]
                total = total - T.components[replaced] * dV[index[s], m]
        for s in range(p, p + q):
            for m in range(n):
                replaced = index[:s] + (m,) + index[s + 1 :]
                total = total + T.components[replaced] * dV[m, index[s]]
        return total

    return TensorField.from_function(T.chart, p, q, component)


def raise_index(
    T: TensorField, slot: int, g: MetricField, position: Optional[int] = None
) -> TensorField:
    """Raise covariant slot `slot` with ``g^{ij}``

    Parameters
    ----------
    T : TensorField
        Tensor with at least one covariant slot
    slot : int
        Covariant slot to raise, counted among covariant slots
    g : MetricField
        The metric
    position : int, optional
        Where the new index goes among the contravariant slots, by default last

    Raises
    ------
    SlotError
        If `slot` or `position` is out of range
    """
    _check_chart(T, g.g)
    p, q = T.contravariant_rank, T.covariant_rank
    if not 0 <= slot < q:
        raise SlotError(f"covariant slot {slot} out of range for rank ({p},{q})")
    position = p if position is None else position
    if not 0 <= position <= p:
        raise SlotError(f"contravariant position {position} out of range for rank ({p + 1},{q - 1})")
    n = T.dimension
    zero = T.context.zero

    def component(*index):
        upper = index[: p + 1]
        lower = index[p + 1 :]
        a = upper[position]
        old_upper = upper[:position] + upper[position + 1 :]
        return _sum(
            (
                g.g_inv[a, m] * T.components[old_upper + lower[:slot] + (m,) + lower[slot:]]
                for m in range(n)
            ),
            zero,
        )

    return TensorField.from_function(T.chart, p + 1, q - 1, component)


def lower_index(T: TensorField, slot: int, g: MetricField, position: int = 0) -> TensorField:
    """Lower contravariant slot `slot` with ``g_{ij}``

    The new covariant index is placed at `position` among the covariant
    slots, by default first.

    Raises
    ------
    SlotError
        If `slot` or `position` is out of range
    """
    _check_chart(T, g.g)
    p, q = T.contravariant_rank, T.covariant_rank
    if not 0 <= slot < p:
        raise SlotError(f"contravariant slot {slot} out of range for rank ({p},{q})")
    if not 0 <= position <= q:
        raise SlotError(f"covariant position {position} out of range for rank ({p - 1},{q + 1})")
    n = T.dimension
    zero = T.context.zero

    def component(*index):
        upper = index[: p - 1]
        lower = index[p - 1 :]
        b = lower[position]
        old_lower = lower[:position] + lower[position + 1 :]
        return _sum(
            (
                g.g[b, m] * T.components[upper[:slot] + (m,) + upper[slot:] + old_lower]
                for m in range(n)
            ),
            zero,
        )

    return TensorField.from_function(T.chart, p - 1, q + 1, component)


def contract(T: TensorField, upper_slot: int, lower_slot: int) -> TensorField:
    """Trace over contravariant slot `upper_slot` and covariant slot `lower_slot`

    Raises
    ------
    SlotError
        If either slot is out of range for its variance
    """
    p, q = T.contravariant_rank, T.covariant_rank
    if not (0 <= upper_slot < p and 0 <= lower_slot < q):
        raise SlotError(
            f"cannot contract upper slot {upper_slot} with lower slot {lower_slot} "
            f"of a rank ({p},{q}) tensor"
        )
    n = T.dimension
    zero = T.context.zero

    def component(*index):
        upper = index[: p - 1]
        lower = index[p - 1 :]

        def full(m):
            return (
                upper[:upper_slot] + (m,) + upper[upper_slot:]
                + lower[:lower_slot] + (m,) + lower[lower_slot:]
            )

        return _sum((T.components[full(m)] for m in range(n)), zero)

    return TensorField.from_function(T.chart, p - 1, q - 1, component)


def tensor_product(A: TensorField, B: TensorField) -> TensorField:
    """``A ⊗ B``; upper slots of A then B, followed by lower slots of A then B"""
    _check_chart(A, B)
    pa, pb = A.contravariant_rank, B.contravariant_rank

    def component(*index):
        p = pa + pb
        a_index = index[:pa] + index[p : p + A.covariant_rank]
        b_index = index[pa:p] + index[p + A.covariant_rank :]
        return A.components[a_index] * B.components[b_index]

    return TensorField.from_function(
        A.chart, pa + pb, A.covariant_rank + B.covariant_rank, component
    )


def differential(f: ScalarExpr, chart: Chart) -> TensorField:
    """``df`` as a (0,1) tensor"""
    f = chart.scalar(f)
    return TensorField.from_function(
        chart, 0, 1, lambda i: differentiate(f, chart.coordinates[i])
    )


def gradient(f: ScalarExpr, g: MetricField) -> TensorField:
    """``grad f``, the metric dual of ``df``"""
    return raise_index(differential(f, g.chart), 0, g)


def exterior_derivative_1form(eta: TensorField) -> TensorField:
    """``(dη)_ij = ∂_i η_j − ∂_j η_i``"""
    if (eta.contravariant_rank, eta.covariant_rank) != (0, 1):
        raise SlotError("expected a (0,1) tensor")
    coords = eta.chart.coordinates
    return TensorField.from_function(
        eta.chart,
        0,
        2,
        lambda i, j: differentiate(eta[j], coords[i]) - differentiate(eta[i], coords[j]),
    )


def exterior_derivative_2form(Phi: TensorField) -> TensorField:
    """``(dΦ)_ijk = ∂_i Φ_jk + ∂_j Φ_ki + ∂_k Φ_ij``"""
    if (Phi.contravariant_rank, Phi.covariant_rank) != (0, 2):
        raise SlotError("expected a (0,2) tensor")
    c = Phi.chart.coordinates
    return TensorField.from_function(
        Phi.chart,
        0,
        3,
        lambda i, j, k: differentiate(Phi[j, k], c[i])
        + differentiate(Phi[k, i], c[j])
        + differentiate(Phi[i, j], c[k]),
    )


def wedge_1_2(eta: TensorField, Phi: TensorField) -> TensorField:
    """``(η∧Φ)_ijk = η_i Φ_jk + η_j Φ_ki + η_k Φ_ij``"""
    _check_chart(eta, Phi)
    return TensorField.from_function(
        eta.chart,
        0,
        3,
        lambda i, j, k: eta[i] * Phi[j, k] + eta[j] * Phi[k, i] + eta[k] * Phi[i, j],
    )


def evaluate_matrix(
    T: TensorField, point: Mapping[str, Any], digits: int = 50
) -> tuple[list[list[Any]], bool]:
    """Values of a rank-2 tensor at `point` and whether they are exact

    Falls back to approximate evaluation when an exponential is irrational
    at `point`.
    """
    if T.rank != 2:
        raise SlotError("expected a rank-2 tensor")
    try:
        values = T.evaluate(point)
        exact = True
    except ExactEvaluationError:
        values = T.evaluate(point, approximate=True, digits=digits)
        exact = False
    return values.tolist(), exact


def matrix_rank_at(T: TensorField, point: Mapping[str, Any], digits: int = 50) -> int:
    """Rank of a rank-2 tensor at `point`, exact whenever the values are rational"""
    values, exact = evaluate_matrix(T, point, digits)
    if exact:
        return exact_rank(values)
    with mpmath.workdps(digits):
        tol = mpmath.mpf(10) ** (-(digits // 2))
        return int(sum(1 for s in mpmath.svd_r(mpmath.matrix(values), compute_uv=False) if s > tol))


def check_positive_definite(
    g: MetricField, points: Sequence[Mapping[str, Any]], digits: int = 50
) -> VerdictReport:
    """Sylvester criterion at each sample point

    Points where the metric has a pole are skipped with a
    :class:`~kenmo.base.SamplePointSkippedWarning`.
    """
    notes = []
    checked = 0
    for point in points:
        try:
            values, exact = evaluate_matrix(g.g, point, digits)
        except PoleError as err:
            warnings.warn(f"skipping sample point {dict(point)}: {err}", SamplePointSkippedWarning)
            continue
        checked += 1
        if exact:
            minors = leading_minors(values)
        else:
            with mpmath.workdps(digits):
                minors = [
                    mpmath.det(mpmath.matrix([row[:k] for row in values[:k]]))
                    for k in range(1, len(values) + 1)
                ]
        if any(m <= 0 for m in minors):
            k = next(k for k, m in enumerate(minors, start=1) if m <= 0)
            notes.append(f"leading minor {k} is {minors[k - 1]} at {_format_point(point)}")
            return VerdictReport("positive_definite", False, notes=notes)
    if checked == 0:
        notes.append("no usable sample point")
        return VerdictReport("positive_definite", False, notes=notes)
    notes.append(f"all leading minors positive at {checked} sample point(s)")
    return VerdictReport("positive_definite", True, notes=notes)


def _format_point(point: Mapping[str, Any]) -> str:
    return "(" + ", ".join(f"{k}={v}" for k, v in point.items()) + ")"
