"""Contains definitions for essential, base classes: errors, warnings and verdicts."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any, Optional

from attrs import define, field

if TYPE_CHECKING:
    from kenmo.symbolic.expr import ScalarExpr
    from kenmo.tensors import TensorField


class KenmoError(Exception):
    """Base class for all errors raised by kenmo"""


class ExpressionError(KenmoError, ValueError):
    """Raised for malformed or unsupported scalar expressions.

    Parameters
    ----------
    message : str
        What went wrong
    position : int, optional
        0-based character offset into the parsed text, if known
    """

    def __init__(self, message: str, position: Optional[int] = None):
        super().__init__(message)
        self.message = message
        self.position = position

    def __str__(self) -> str:
        if self.position is None:
            return self.message
        return f"{self.message} (at position {self.position})"


class ExprSyntaxError(ExpressionError):
    """Text does not conform to the expression grammar"""


class UnknownIdentifierError(ExpressionError):
    """Identifier is not a coordinate of the context"""


class NonlinearExpArgumentError(ExpressionError):
    """Argument of ``exp`` is not a linear form in the coordinates"""


class GeneratorLatticeError(ExpressionError):
    """``exp(L)`` is not an integer power product of the declared generators"""


class ExprZeroDivisionError(ExpressionError, ZeroDivisionError):
    """Division by an expression that is identically zero"""


class PoleError(KenmoError, ArithmeticError):
    """Denominator vanishes at the evaluation point"""


class ExactEvaluationError(KenmoError, ValueError):
    """Exact evaluation was requested for an irrational value"""


class ChartMismatchError(KenmoError, ValueError):
    """Operands live on different charts"""


class SingularMetricError(KenmoError, ValueError):
    """Metric determinant is the zero expression"""


class SlotError(KenmoError, IndexError):
    """Tensor slot is out of range or of the wrong variance"""


class DegeneratePlaneError(KenmoError, ValueError):
    """The two vector fields do not span a plane"""


class StructureError(KenmoError, ValueError):
    """Invalid input for an almost contact structure or one of its builders"""


class SolitonSpecError(KenmoError, ValueError):
    """Soliton data is inconsistent with the requested mode"""


class ManifestError(KenmoError, ValueError):
    """Invalid manifest text.

    Parameters
    ----------
    message : str
        What went wrong
    line : int, optional
        1-based line number, if known
    column : int, optional
        1-based column, if known
    """

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        where = f"line {self.line}" if self.column is None else f"line {self.line}, column {self.column}"
        return f"{where}: {self.message}"


class KenmoWarning(UserWarning):
    """Base class for nonfatal conditions"""


class EtaReplacedWarning(KenmoWarning):
    """The supplied 1-form was replaced by the metric dual of the Reeb field"""


class SamplePointSkippedWarning(KenmoWarning):
    """A numeric sample point was skipped (pole or approximate-only value)"""


class ReferenceTableWarning(KenmoWarning):
    """A recomputed component disagrees with a printed reference table"""


@define(frozen=True)
class Witness:
    """First nonzero component of a residual"""

    index: tuple[int, ...]
    """Component index, contravariant slots first"""
    value: ScalarExpr
    """The nonzero component"""
    labels: tuple[str, ...] = ()
    """Coordinate names for each slot of :attr:`index`"""

    def describe(self) -> str:
        where = ",".join(self.labels) if self.labels else ",".join(map(str, self.index))
        return f"[{where}] = {self.value}"

    def as_dict(self) -> dict[str, Any]:
        return {
            "index": list(self.index),
            "labels": list(self.labels),
            "value": str(self.value),
        }


@define(eq=False)
class VerdictReport:
    """Pass/fail verdict for one named identity.

    ``passed`` is True exactly when every component of ``residual`` is the
    canonical zero expression."""

    name: str
    """Identity being checked"""
    passed: bool
    residual: Optional[TensorField] = field(default=None, repr=False)
    """Residual tensor; rank (0,0) for scalar identities"""
    witness: Optional[Witness] = None
    """First nonzero residual component on failure"""
    solved: dict[str, ScalarExpr] = field(factory=dict)
    """Named values solved for along the way (λ, μ, ρ, collinearity factor, ...)"""
    classification: Optional[str] = None
    """One of shrinking, steady, expanding, indefinite (soliton verdicts only)"""
    precondition_met: bool = True
    """False when the identity was computed although its hypotheses fail"""
    notes: list[str] = field(factory=list)
    subchecks: list[VerdictReport] = field(factory=list, repr=False)
    """Secondary verdicts reported alongside this one"""

    @classmethod
    def from_residual(cls, name: str, residual: TensorField, **kwargs) -> VerdictReport:
        """Build a verdict that passes iff `residual` is the zero tensor"""
        witness = residual.first_nonzero()
        return cls(
            name=name,
            passed=witness is None,
            residual=residual,
            witness=witness,
            **kwargs,
        )

    def as_dict(self) -> dict[str, Any]:
        """JSON-ready rendering; residual tensors are summarized by the witness"""
        out = {
            "name": self.name,
            "passed": self.passed,
            "witness": self.witness.as_dict() if self.witness else None,
            "solved": {k: str(v) for k, v in sorted(self.solved.items())},
            "classification": self.classification,
            "precondition_met": self.precondition_met,
            "notes": list(self.notes),
        }
        if self.subchecks:
            out["subchecks"] = [sub.as_dict() for sub in self.subchecks]
        return out


def all_passed(verdicts: list[VerdictReport]) -> bool:
    """True iff every top-level verdict passed; subchecks are informational"""
    return all(v.passed for v in verdicts)
