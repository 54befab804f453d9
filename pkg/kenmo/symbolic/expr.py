"""Exact scalar expressions: rational functions in chart coordinates and
formal exponentials of rational linear forms.

Every :class:`ScalarExpr` wraps an element of a sympy rational-function field
whose indeterminates are the chart coordinates followed by one formal
generator ``w_j = exp(a_j · x)`` per declared linear form ``a_j``. Because the
generator forms are linearly independent, the ``w_j`` are algebraically
independent over the coordinates and the reduced numerator/denominator pair
is a canonical form: an expression is zero iff its numerator is the zero
polynomial.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Integral
from typing import Any, Mapping, Sequence, Union

import mpmath
import sympy
from attrs import define, field
from sympy import QQ
from sympy.polys.fields import FracElement
from sympy.polys.fields import field as frac_field
from sympy.polys.orderings import lex

from kenmo.base import (
    ChartMismatchError,
    ExactEvaluationError,
    ExprZeroDivisionError,
    GeneratorLatticeError,
    PoleError,
    UnknownIdentifierError,
)

IDENTIFIER = re.compile(r"[A-Za-z][A-Za-z0-9]*\Z")
"""Allowed coordinate names"""

RESERVED_NAMES = frozenset({"exp"})

LinearForm = tuple[Fraction, ...]
"""Coefficients of a linear form, one per coordinate in declaration order"""

Number = Union[int, Fraction]


def _as_form(form: Sequence) -> LinearForm:
    return tuple(Fraction(a) for a in form)


def _as_forms(forms: Sequence[Sequence]) -> tuple[LinearForm, ...]:
    return tuple(_as_form(form) for form in forms)


def _qq(value: Number) -> Any:
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def _fraction(coeff) -> Fraction:
    rational = QQ.to_sympy(coeff)
    return Fraction(int(rational.p), int(rational.q))


def _sympy_matrix(forms: Sequence[LinearForm]) -> sympy.Matrix:
    return sympy.Matrix(
        [[sympy.Rational(a.numerator, a.denominator) for a in form] for form in forms]
    )


@define(frozen=True)
class ExprContext:
    """Ordered chart coordinates plus the exponential generators an
    expression may use.

    Generator ``j`` stands for ``exp(Σ_i a_ji x_i)`` with
    ``a_j = exp_generators[j]``; its partial derivative along ``x_i`` is
    ``a_ji · w_j``.
    """

    coordinates: tuple[str, ...] = field(converter=tuple)
    """Distinct coordinate names, in declaration (and monomial) order"""
    exp_generators: tuple[LinearForm, ...] = field(default=(), converter=_as_forms)
    """Rational linear forms, linearly independent"""
    _field: Any = field(init=False, repr=False, eq=False)

    @coordinates.validator
    def _check_coordinates(self, attribute, value):
        if len(value) == 0:
            raise ValueError("at least one coordinate is required")
        for name in value:
            if not isinstance(name, str) or not IDENTIFIER.match(name):
                raise ValueError(f"invalid coordinate name {name!r}")
            if name in RESERVED_NAMES:
                raise ValueError(f"{name!r} is reserved and cannot name a coordinate")
        if len(set(value)) != len(value):
            raise ValueError(f"coordinate names must be unique, got {value}")

    @exp_generators.validator
    def _check_generators(self, attribute, value):
        for form in value:
            if len(form) != len(self.coordinates):
                raise ValueError(
                    f"generator {form} has {len(form)} coefficients for "
                    f"{len(self.coordinates)} coordinates"
                )
            if not any(form):
                raise ValueError("exp(0) = 1 cannot be a generator")
        if value and _sympy_matrix(value).rank() < len(value):
            raise ValueError(
                f"exponential generators {value} are not linearly independent"
            )

    def __attrs_post_init__(self):
        names = [sympy.Symbol(c) for c in self.coordinates]
        names += [sympy.Symbol(f"_w{j}") for j in range(len(self.exp_generators))]
        K, *_ = frac_field(names, QQ, lex)
        object.__setattr__(self, "_field", K)

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    @property
    def fraction_field(self):
        """The underlying sympy rational-function field"""
        return self._field

    def index(self, coord: str) -> int:
        """Position of `coord` among the coordinates"""
        try:
            return self.coordinates.index(coord)
        except ValueError:
            raise UnknownIdentifierError(
                f"unknown coordinate {coord!r}; expected one of {list(self.coordinates)}"
            ) from None

    def lattice_exponents(self, form: Sequence) -> tuple[int, ...]:
        """Integer exponents ``k`` with ``form = Σ_j k_j a_j``

        Raises
        ------
        GeneratorLatticeError
            If `form` is not an integer combination of the generators
        """
        form = _as_form(form)
        if not any(form):
            return (0,) * len(self.exp_generators)
        if not self.exp_generators:
            raise GeneratorLatticeError(
                f"exp({format_linear_form(form, self.coordinates)}) needs an "
                "exponential generator, but none are declared"
            )
        basis = _sympy_matrix(self.exp_generators).T
        target = _sympy_matrix([form]).T
        try:
            solution, params = basis.gauss_jordan_solve(target)
        except ValueError:
            solution = None
        if solution is None or any(not x.is_integer for x in solution):
            raise GeneratorLatticeError(
                f"exp({format_linear_form(form, self.coordinates)}) is not an "
                "integer power product of the declared generators "
                f"{[format_linear_form(a, self.coordinates) for a in self.exp_generators]}"
            )
        return tuple(int(x) for x in solution)

    def constant(self, value: Number) -> ScalarExpr:
        return ScalarExpr(self, self._field(_qq(value)))

    @property
    def zero(self) -> ScalarExpr:
        return ScalarExpr(self, self._field.zero)

    @property
    def one(self) -> ScalarExpr:
        return ScalarExpr(self, self._field.one)

    def coordinate(self, coord: str) -> ScalarExpr:
        return ScalarExpr(self, self._field.gens[self.index(coord)])

    def exp(self, form: Sequence) -> ScalarExpr:
        """``exp(Σ a_i x_i)`` as a power product of the generators"""
        exponents = self.lattice_exponents(form)
        K = self._field
        out = K.one
        for j, k in enumerate(exponents):
            if k:
                w = K.gens[self.dimension + j]
                out = out * w**k if k > 0 else out / w**-k
        return ScalarExpr(self, out)


def _coerce(ctx: ExprContext, other) -> ScalarExpr | None:
    if isinstance(other, ScalarExpr):
        if other.ctx != ctx:
            raise ChartMismatchError(
                f"expressions over {ctx.coordinates} and {other.ctx.coordinates} "
                "cannot be combined"
            )
        return other
    if isinstance(other, (Integral, Fraction)) and not isinstance(other, bool):
        return ctx.constant(Fraction(other))
    return None


@define(frozen=True, eq=False)
class ScalarExpr:
    """Exact scalar in canonical rational-exponential form.

    Supports ``+ - * /``, integer powers and comparison with other
    expressions of the same context and with Python rationals."""

    ctx: ExprContext
    frac: FracElement = field(repr=False)

    @property
    def numerator(self):
        return self.frac.numer

    @property
    def denominator(self):
        return self.frac.denom

    def _binary(self, op: str, other, reflected: bool = False):
        other = _coerce(self.ctx, other)
        if other is None:
            return NotImplemented
        a, b = (other, self) if reflected else (self, other)
        return arith(op, a, b)

    def __add__(self, other):
        return self._binary("add", other)

    def __radd__(self, other):
        return self._binary("add", other, reflected=True)

    def __sub__(self, other):
        return self._binary("sub", other)

    def __rsub__(self, other):
        return self._binary("sub", other, reflected=True)

    def __mul__(self, other):
        return self._binary("mul", other)

    def __rmul__(self, other):
        return self._binary("mul", other, reflected=True)

    def __truediv__(self, other):
        return self._binary("div", other)

    def __rtruediv__(self, other):
        return self._binary("div", other, reflected=True)

    def __neg__(self) -> ScalarExpr:
        return ScalarExpr(self.ctx, -self.frac)

    def __pos__(self) -> ScalarExpr:
        return self

    def __pow__(self, exponent: int) -> ScalarExpr:
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0 and is_zero(self):
            raise ExprZeroDivisionError("zero raised to a negative power")
        if exponent < 0:
            return ScalarExpr(self.ctx, self.ctx.fraction_field.one / self.frac**-exponent)
        return ScalarExpr(self.ctx, self.frac**exponent)

    def __eq__(self, other) -> bool:
        try:
            other = _coerce(self.ctx, other)
        except ChartMismatchError:
            return False
        if other is None:
            return NotImplemented
        return not (self.frac - other.frac)

    def __hash__(self) -> int:
        if self.frac.numer.is_ground and self.frac.denom.is_ground:
            return hash(to_fraction(self))
        return hash(self.frac)

    def __bool__(self) -> bool:
        return not is_zero(self)

    def __str__(self) -> str:
        from kenmo.symbolic.parser import format_expr

        return format_expr(self)

    def __repr__(self) -> str:
        return f"ScalarExpr({str(self)!r})"


def arith(op: str, a: ScalarExpr, b: ScalarExpr) -> ScalarExpr:
    """Exact ``add``, ``sub``, ``mul`` or ``div`` of two expressions

    Raises
    ------
    ExprZeroDivisionError
        When dividing by an expression that is identically zero
    ChartMismatchError
        When the operands come from different contexts
    """
    if a.ctx != b.ctx:
        raise ChartMismatchError(
            f"expressions over {a.ctx.coordinates} and {b.ctx.coordinates} "
            "cannot be combined"
        )
    if op == "add":
        result = a.frac + b.frac
    elif op == "sub":
        result = a.frac - b.frac
    elif op == "mul":
        result = a.frac * b.frac
    elif op == "div":
        if is_zero(b):
            raise ExprZeroDivisionError("division by an expression that is identically zero")
        result = a.frac / b.frac
    else:
        raise ValueError(f"unknown operation {op!r}; expected add, sub, mul or div")
    return ScalarExpr(a.ctx, result)


def is_zero(e: ScalarExpr) -> bool:
    """True iff the canonical numerator is the zero polynomial"""
    return not e.frac.numer


def differentiate(e: ScalarExpr, coord: str) -> ScalarExpr:
    """Exact partial derivative of `e` along coordinate `coord`

    Raises
    ------
    UnknownIdentifierError
        If `coord` is not a coordinate of the expression's context
    """
    ctx = e.ctx
    i = ctx.index(coord)
    K = ctx.fraction_field
    out = e.frac.diff(K.gens[i])
    for j, form in enumerate(ctx.exp_generators):
        if form[i]:
            w = K.gens[ctx.dimension + j]
            out += K(_qq(form[i])) * w * e.frac.diff(w)
    return ScalarExpr(ctx, out)


def is_constant(e: ScalarExpr) -> bool:
    """True iff every coordinate partial of `e` is zero"""
    return all(is_zero(differentiate(e, c)) for c in e.ctx.coordinates)


def to_fraction(e: ScalarExpr) -> Fraction:
    """The rational value of a constant expression

    Raises
    ------
    ValueError
        If `e` depends on a coordinate
    """
    numer, denom = e.frac.numer, e.frac.denom
    if not (numer.is_ground and denom.is_ground):
        raise ValueError(f"{e} is not a rational constant")
    return _fraction(numer.LC if numer else QQ.zero) / _fraction(denom.LC)


def _point_values(ctx: ExprContext, point: Mapping[str, Any]) -> list:
    missing = [c for c in ctx.coordinates if c not in point]
    if missing:
        raise ValueError(f"point is missing coordinates {missing}")
    extra = [c for c in point if c not in ctx.coordinates]
    if extra:
        raise UnknownIdentifierError(f"point assigns unknown coordinates {extra}")
    return [point[c] for c in ctx.coordinates]


def _to_mpf(value) -> mpmath.mpf:
    if isinstance(value, mpmath.mpf):
        return value
    value = Fraction(value)
    return mpmath.mpf(value.numerator) / value.denominator


def _eval_poly(poly, values: list, zero):
    total = zero
    for monom, coeff in poly.terms():
        term = _fraction(coeff)
        if not isinstance(zero, Fraction):
            term = _to_mpf(term)
        for value, power in zip(values, monom):
            if power:
                term *= value**power
        total += term
    return total


def evaluate(
    e: ScalarExpr,
    point: Mapping[str, Any],
    approximate: bool = False,
    digits: int = 50,
) -> Union[Fraction, mpmath.mpf]:
    """Value of `e` at `point`

    Parameters
    ----------
    e : ScalarExpr
        Expression to evaluate
    point : Mapping[str, Any]
        Rational value (anything :class:`fractions.Fraction` accepts) for
        every coordinate; in approximate mode :class:`mpmath.mpf` values are
        accepted too
    approximate : bool, optional
        Evaluate exponentials to `digits` significant digits with mpmath
        and return an :class:`mpmath.mpf`, by default False
    digits : int, optional
        Working precision for approximate mode, by default 50

    Returns
    -------
    Fraction or mpmath.mpf
        Exact rational in exact mode

    Raises
    ------
    PoleError
        If the denominator vanishes at `point`
    ExactEvaluationError
        In exact mode, if an exponential with a nonzero argument remains
    """
    ctx = e.ctx
    raw = _point_values(ctx, point)
    if approximate:
        with mpmath.workdps(digits):
            values = [_to_mpf(x) for x in raw]
            for form in ctx.exp_generators:
                values.append(mpmath.exp(sum(_to_mpf(a) * x for a, x in zip(form, values))))
            numer = _eval_poly(e.frac.numer, values, mpmath.mpf(0))
            denom = _eval_poly(e.frac.denom, values, mpmath.mpf(0))
            if denom == 0:
                raise PoleError(f"{e} has a pole at {dict(point)}")
            return numer / denom

    values = [Fraction(x) for x in raw]
    for j, form in enumerate(ctx.exp_generators):
        argument = sum((a * x for a, x in zip(form, values)), Fraction(0))
        uses_generator = any(
            monom[ctx.dimension + j]
            for poly in (e.frac.numer, e.frac.denom)
            for monom in poly.monoms()
        )
        if argument != 0 and uses_generator:
            raise ExactEvaluationError(
                f"exp({format_linear_form(form, ctx.coordinates)}) is irrational at "
                f"{dict(point)}; use approximate mode"
            )
        values.append(Fraction(1))
    numer = _eval_poly(e.frac.numer, values, Fraction(0))
    denom = _eval_poly(e.frac.denom, values, Fraction(0))
    if denom == 0:
        raise PoleError(f"{e} has a pole at {dict(point)}")
    return numer / denom


def scale_generators(e: ScalarExpr, factors: Sequence[Number]) -> ScalarExpr:
    """Substitute ``w_j → factors[j] · w_j`` for every generator.

    With ``w = exp(t)`` and ``factors = [c]`` this is the translation
    ``t → t + ln c`` at the expression level.
    """
    ctx = e.ctx
    if len(factors) != len(ctx.exp_generators):
        raise ValueError(
            f"expected {len(ctx.exp_generators)} factors, got {len(factors)}"
        )
    ring = ctx.fraction_field.ring
    replacements = [
        (ring.gens[ctx.dimension + j], ring.gens[ctx.dimension + j] * _qq(c))
        for j, c in enumerate(factors)
    ]
    if not replacements:
        return e
    numer = e.frac.numer.compose(replacements)
    denom = e.frac.denom.compose(replacements)
    return ScalarExpr(ctx, ctx.fraction_field.new(numer, denom))


def lift_expr(e: ScalarExpr, target: ExprContext) -> ScalarExpr:
    """Re-express `e` over a context with more coordinates and generators.

    Coordinates are matched by name; generators are matched by their linear
    forms, which must also be generators of `target` (after extending by
    zeros for the new coordinates).
    """
    source = e.ctx
    if source == target:
        return e
    positions = [target.index(c) for c in source.coordinates]
    for j, form in enumerate(source.exp_generators):
        lifted = [Fraction(0)] * target.dimension
        for a, p in zip(form, positions):
            lifted[p] = a
        lifted = tuple(lifted)
        if lifted not in target.exp_generators:
            raise GeneratorLatticeError(
                f"generator exp({format_linear_form(form, source.coordinates)}) "
                "is not a generator of the target context"
            )
        positions.append(target.dimension + target.exp_generators.index(lifted))

    ring = target.fraction_field.ring
    width = target.dimension + len(target.exp_generators)

    def _lift(poly):
        terms = {}
        for monom, coeff in poly.terms():
            out = [0] * width
            for p, power in zip(positions, monom):
                out[p] = power
            terms[tuple(out)] = coeff
        return ring.from_dict(terms)

    return ScalarExpr(target, target.fraction_field.new(_lift(e.frac.numer), _lift(e.frac.denom)))


def format_linear_form(form: Sequence, coordinates: Sequence[str]) -> str:
    """Render ``Σ a_i x_i`` in expression grammar, e.g. ``1/2*t - x``"""
    parts = []
    for a, name in zip(_as_form(form), coordinates):
        if a == 0:
            continue
        magnitude = abs(a)
        text = name if magnitude == 1 else f"{magnitude}*{name}"
        if not parts:
            parts.append(f"-{text}" if a < 0 else text)
        else:
            parts.append(f" - {text}" if a < 0 else f" + {text}")
    return "".join(parts) if parts else "0"
