"""Parsing and printing of scalar expressions.

Grammar (whitespace is insignificant)::

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := '-' factor | base ('^' ['-'] int)?
    base    := int | ident | 'exp' '(' linform ')' | '(' expr ')'

Rational literals are written ``int/int``. The argument of ``exp`` must be a
rational linear form in the coordinates with no constant term.
:func:`format_expr` emits this grammar, so printing and reparsing an
expression is a fixed point.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from attrs import define

from kenmo.base import (
    ExprSyntaxError,
    ExprZeroDivisionError,
    GeneratorLatticeError,
    NonlinearExpArgumentError,
    UnknownIdentifierError,
)
from kenmo.symbolic.expr import (
    ExprContext,
    LinearForm,
    ScalarExpr,
    _fraction,
    format_linear_form,
    is_zero,
)

_TOKEN = re.compile(r"\s*(?:(?P<number>\d+)|(?P<ident>[A-Za-z][A-Za-z0-9]*)|(?P<op>\S))")


@define(frozen=True)
class Token:
    kind: str
    """``number``, ``ident``, ``op`` or ``end``"""
    text: str
    position: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            break
        kind = match.lastgroup
        tokens.append(Token(kind, match.group(kind), match.start(kind)))
        pos = match.end()
    for tok in tokens:
        if tok.kind == "op" and tok.text not in "+-*/^()":
            raise ExprSyntaxError(f"unexpected character {tok.text!r}", tok.position)
    tokens.append(Token("end", "", len(text)))
    return tokens


# syntax tree ------------------------------------------------------------------


@define(frozen=True)
class Num:
    value: int
    position: int


@define(frozen=True)
class Var:
    name: str
    position: int


@define(frozen=True)
class Neg:
    operand: Node
    position: int


@define(frozen=True)
class BinOp:
    op: str
    left: Node
    right: Node
    position: int


@define(frozen=True)
class Pow:
    base: Node
    exponent: int
    position: int


@define(frozen=True)
class Exp:
    argument: Node
    position: int


Node = Union[Num, Var, Neg, BinOp, Pow, Exp]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.current
        if tok.text != text or tok.kind != "op":
            found = repr(tok.text) if tok.kind != "end" else "end of input"
            raise ExprSyntaxError(f"expected {text!r}, found {found}", tok.position)
        return self.advance()

    def parse(self) -> Node:
        if self.current.kind == "end":
            raise ExprSyntaxError("empty expression", 0)
        node = self.expr()
        if self.current.kind != "end":
            raise ExprSyntaxError(
                f"unexpected {self.current.text!r} after expression", self.current.position
            )
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self.advance()
            node = BinOp(op.text, node, self.term(), op.position)
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self.advance()
            node = BinOp(op.text, node, self.factor(), op.position)
        return node

    def factor(self) -> Node:
        if self.current.kind == "op" and self.current.text == "-":
            op = self.advance()
            return Neg(self.factor(), op.position)
        node = self.base()
        if self.current.kind == "op" and self.current.text == "^":
            op = self.advance()
            sign = 1
            if self.current.kind == "op" and self.current.text == "-":
                self.advance()
                sign = -1
            if self.current.kind != "number":
                raise ExprSyntaxError("expected an integer exponent", self.current.position)
            node = Pow(node, sign * int(self.advance().text), op.position)
        return node

    def base(self) -> Node:
        tok = self.current
        if tok.kind == "number":
            self.advance()
            return Num(int(tok.text), tok.position)
        if tok.kind == "ident":
            self.advance()
            if tok.text == "exp":
                self.expect("(")
                argument = self.expr()
                self.expect(")")
                return Exp(argument, tok.position)
            return Var(tok.text, tok.position)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        found = repr(tok.text) if tok.kind != "end" else "end of input"
        raise ExprSyntaxError(f"unexpected {found}", tok.position)


def parse_tree(text: str) -> Node:
    """Syntax tree of `text`, without resolving identifiers"""
    return _Parser(text).parse()


# interpretation ---------------------------------------------------------------


def _linear(node: Node, coordinates: Sequence[str]) -> tuple[Fraction, LinearForm]:
    """(constant, coefficients) of an affine expression tree"""
    n = len(coordinates)
    zero = (Fraction(0),) * n

    def affine(node: Node) -> tuple[Fraction, list[Fraction]]:
        if isinstance(node, Num):
            return Fraction(node.value), list(zero)
        if isinstance(node, Var):
            if node.name not in coordinates:
                raise UnknownIdentifierError(
                    f"unknown identifier {node.name!r}", node.position
                )
            coeffs = list(zero)
            coeffs[coordinates.index(node.name)] = Fraction(1)
            return Fraction(0), coeffs
        if isinstance(node, Neg):
            c, a = affine(node.operand)
            return -c, [-x for x in a]
        if isinstance(node, BinOp):
            c1, a1 = affine(node.left)
            c2, a2 = affine(node.right)
            if node.op == "+":
                return c1 + c2, [x + y for x, y in zip(a1, a2)]
            if node.op == "-":
                return c1 - c2, [x - y for x, y in zip(a1, a2)]
            if node.op == "*":
                if not any(a1):
                    return c1 * c2, [c1 * y for y in a2]
                if not any(a2):
                    return c1 * c2, [c2 * x for x in a1]
                raise NonlinearExpArgumentError(
                    "product of two coordinate-dependent factors inside exp", node.position
                )
            if any(a2):
                raise NonlinearExpArgumentError(
                    "division by a coordinate-dependent factor inside exp", node.position
                )
            if c2 == 0:
                raise ExprZeroDivisionError("division by zero", node.position)
            return c1 / c2, [x / c2 for x in a1]
        if isinstance(node, Pow):
            c, a = affine(node.base)
            if not any(a):
                if c == 0 and node.exponent < 0:
                    raise ExprZeroDivisionError("zero raised to a negative power", node.position)
                return c**node.exponent, list(zero)
            if node.exponent == 1:
                return c, a
            raise NonlinearExpArgumentError(
                "power of a coordinate-dependent factor inside exp", node.position
            )
        raise NonlinearExpArgumentError("nested exp is not a linear form", node.position)

    constant, coeffs = affine(node)
    return constant, tuple(coeffs)


def _exp_form(node: Exp, coordinates: Sequence[str]) -> LinearForm:
    constant, form = _linear(node.argument, coordinates)
    if constant != 0:
        raise NonlinearExpArgumentError(
            f"exp argument has constant term {constant}; only linear forms are allowed",
            node.position,
        )
    return form


def parse_linear_form(text: str, coordinates: Sequence[str]) -> LinearForm:
    """Coefficients of a linear form such as ``2*t - x/3``

    Raises
    ------
    NonlinearExpArgumentError
        If `text` is not linear or has a constant term
    """
    constant, form = _linear(parse_tree(text), tuple(coordinates))
    if constant != 0:
        raise NonlinearExpArgumentError(f"linear form {text!r} has constant term {constant}", 0)
    return form


def _evaluate(node: Node, ctx: ExprContext) -> ScalarExpr:
    if isinstance(node, Num):
        return ctx.constant(node.value)
    if isinstance(node, Var):
        if node.name not in ctx.coordinates:
            raise UnknownIdentifierError(f"unknown identifier {node.name!r}", node.position)
        return ctx.coordinate(node.name)
    if isinstance(node, Neg):
        return -_evaluate(node.operand, ctx)
    if isinstance(node, Exp):
        form = _exp_form(node, ctx.coordinates)
        try:
            return ctx.exp(form)
        except GeneratorLatticeError as err:
            raise GeneratorLatticeError(err.message, node.position) from None
    if isinstance(node, Pow):
        base = _evaluate(node.base, ctx)
        if node.exponent < 0 and is_zero(base):
            raise ExprZeroDivisionError("zero raised to a negative power", node.position)
        return base**node.exponent
    left = _evaluate(node.left, ctx)
    right = _evaluate(node.right, ctx)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if is_zero(right):
        raise ExprZeroDivisionError("division by an expression that is identically zero", node.position)
    return left / right


def parse_expr(text: str, ctx: ExprContext) -> ScalarExpr:
    """Parse `text` into a canonical :class:`ScalarExpr` over `ctx`

    Raises
    ------
    ExprSyntaxError
        If `text` does not follow the grammar
    UnknownIdentifierError
        If an identifier is not a coordinate of `ctx`
    NonlinearExpArgumentError
        If the argument of ``exp`` is not a linear form
    GeneratorLatticeError
        If ``exp(L)`` is not a power product of the generators of `ctx`
    ExprZeroDivisionError
        On division by an expression that is identically zero
    """
    return _evaluate(parse_tree(text), ctx)


def _exp_nodes(node: Node) -> Iterable[Exp]:
    if isinstance(node, Exp):
        yield node
        yield from _exp_nodes(node.argument)
    elif isinstance(node, Neg):
        yield from _exp_nodes(node.operand)
    elif isinstance(node, Pow):
        yield from _exp_nodes(node.base)
    elif isinstance(node, BinOp):
        yield from _exp_nodes(node.left)
        yield from _exp_nodes(node.right)


def _rational_gcd(values: Iterable[Fraction]) -> Fraction:
    values = [abs(v) for v in values]
    common = math.lcm(*(v.denominator for v in values))
    return Fraction(math.gcd(*(int(v * common) for v in values)), common)


def infer_context(coordinates: Sequence[str], texts: Iterable[str]) -> ExprContext:
    """Context over `coordinates` with the generators the ``exp`` calls in
    `texts` need.

    Forms along the same direction share one generator, scaled so that every
    occurring form is an integer multiple of it. Generators are ordered by
    first appearance.

    Raises
    ------
    GeneratorLatticeError
        If the occurring directions are linearly dependent; declare the
        generators explicitly in that case
    """
    coordinates = tuple(coordinates)
    directions: dict[LinearForm, list[Fraction]] = {}
    for text in texts:
        for node in _exp_nodes(parse_tree(text)):
            form = _exp_form(node, coordinates)
            if not any(form):
                continue
            lead = next(a for a in form if a != 0)
            key = tuple(a / lead for a in form)
            directions.setdefault(key, []).append(lead)
    generators = [
        tuple(a * _rational_gcd(scales) for a in key) for key, scales in directions.items()
    ]
    try:
        return ExprContext(coordinates, generators)
    except ValueError as err:
        if "linearly independent" not in str(err):
            raise
        raise GeneratorLatticeError(
            "exp arguments span dependent directions "
            f"{[format_linear_form(g, coordinates) for g in generators]}; "
            "declare the exponential generators explicitly"
        ) from None


# printing ---------------------------------------------------------------------


def _format_coefficient_term(coeff: Fraction, factors: list[str]) -> str:
    if not factors:
        return str(coeff)
    body = "*".join(factors)
    if coeff == 1:
        return body
    if coeff == -1:
        return f"-{body}"
    return f"{coeff}*{body}"


def _term_factors(monom: tuple[int, ...], ctx: ExprContext) -> list[str]:
    n = ctx.dimension
    factors = []
    for name, power in zip(ctx.coordinates, monom[:n]):
        if power == 1:
            factors.append(name)
        elif power:
            factors.append(f"{name}^{power}")
    exponent = [Fraction(0)] * n
    for k, form in zip(monom[n:], ctx.exp_generators):
        for i, a in enumerate(form):
            exponent[i] += k * a
    if any(exponent):
        factors.append(f"exp({format_linear_form(exponent, ctx.coordinates)})")
    return factors


def _format_poly(poly, ctx: ExprContext) -> tuple[str, int, int]:
    """(text, number of terms, number of factors in a single term)"""
    terms = poly.terms()
    if not terms:
        return "0", 1, 0
    parts = []
    nfactors = 0
    for k, (monom, coeff) in enumerate(terms):
        factors = _term_factors(monom, ctx)
        nfactors = len(factors)
        text = _format_coefficient_term(_fraction(coeff), factors)
        if k == 0:
            parts.append(text)
        elif text.startswith("-"):
            parts.append(f" - {text[1:]}")
        else:
            parts.append(f" + {text}")
    return "".join(parts), len(terms), nfactors


def format_expr(e: ScalarExpr) -> str:
    """Render `e` in expression grammar, terms in lexicographic order"""
    ctx = e.ctx
    numer, n_terms, _ = _format_poly(e.frac.numer, ctx)
    if e.frac.denom == 1:
        return numer
    denom, d_terms, d_factors = _format_poly(e.frac.denom, ctx)
    if n_terms > 1:
        numer = f"({numer})"
    single_factor = d_terms == 1 and (
        (d_factors == 1 and "*" not in denom) or (d_factors == 0 and "/" not in denom)
    )
    if not single_factor:
        denom = f"({denom})"
    return f"{numer}/{denom}"


def context_for(
    coordinates: Sequence[str],
    texts: Iterable[str] = (),
    exp_generators: Optional[Sequence[Sequence]] = None,
) -> ExprContext:
    """Context with declared generators, or inferred ones when none are given"""
    if exp_generators is not None:
        return ExprContext(tuple(coordinates), exp_generators)
    return infer_context(coordinates, texts)
