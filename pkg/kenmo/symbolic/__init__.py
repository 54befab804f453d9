"""Exact rational-exponential scalar expressions"""

from kenmo.symbolic.expr import (
    ExprContext,
    ScalarExpr,
    arith,
    differentiate,
    evaluate,
    format_linear_form,
    is_constant,
    is_zero,
    lift_expr,
    scale_generators,
    to_fraction,
)
from kenmo.symbolic.parser import (
    context_for,
    format_expr,
    infer_context,
    parse_expr,
    parse_linear_form,
    parse_tree,
)
