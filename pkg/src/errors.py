"""
pointspec - Error Module.

Exception hierarchy shared by the library and the command line. Every
error carries the process exit code the CLI reports for it and renders
itself as a machine-readable object.

Exit codes:
    2: Input problems (parse, validation, preconditions).
    3: Numerical failures (quadrature, contour, index).
    4: Resolution limits and degenerate families.

Classes:
    PointSpecError: Base class with exit code and dictionary form.
    InputError: Family for malformed or inadmissible input.
    NumericalError: Family for failed numerical procedures.
    ResolutionLimitError: Family for problems the method cannot resolve.
"""

from typing import Any, Dict, List, Optional


class PointSpecError(Exception):
    """
    Base class for all pointspec errors.

    Attributes:
        exit_code: Process exit code used by the CLI.
        details: Extra structured context for the error object.
    """

    exit_code = 3

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Returns the machine-readable error object."""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "details": self.details,
        }


class InputError(PointSpecError):
    """Input that cannot be parsed or violates a precondition."""

    exit_code = 2


class NumericalError(PointSpecError):
    """A numerical procedure failed to reach its accuracy contract."""

    exit_code = 3


class ResolutionLimitError(PointSpecError):
    """The requested quantity is outside what the method can resolve."""

    exit_code = 4


class ParseError(InputError):
    """
    Schema violation in a model document.

    Attributes:
        field_path: Dotted path of the offending field (e.g. "T.b").
    """

    def __init__(self, field_path: str, message: str):
        super().__init__(
            f"{field_path}: {message}",
            {"field_path": field_path},
        )
        self.field_path = field_path


class ValidationError(InputError):
    """
    One or more invariant violations in an otherwise well-formed model.

    Attributes:
        issues: Human-readable issue strings, one per violation.
    """

    def __init__(self, issues: List[str]):
        summary = issues[0] if len(issues) == 1 else f"{len(issues)} invalid fields"
        super().__init__(summary, {"issues": list(issues)})
        self.issues = list(issues)


class PreconditionError(InputError):
    """An operation was called outside its stated domain."""


class BranchPointError(InputError):
    """The spectral parameter sits on the branch point lambda = 0."""


class AmbiguousBoundaryError(InputError):
    """A positive lambda was given without choosing a boundary side."""


class ParityUndecidableError(InputError):
    """A sampled potential is stored on a grid that cannot be mirrored."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach the requested tolerance."""


class ContourThroughZeroError(NumericalError):
    """A zero of the characteristic function lies on a search contour."""


class NonIntegerIndexError(NumericalError):
    """The multiplicity contour integral did not settle on a positive integer."""


class NonRealCouplingError(NumericalError):
    """A boundary Weyl value that must be real came out non-real."""


class CriterionViolatedError(NumericalError):
    """The embedded-eigenvalue criterion does not hold at the given k."""


class PoleError(NumericalError):
    """Evaluation requested at a pole of a closed-form expression."""


class ResolutionError(ResolutionLimitError):
    """The finite-difference grid is too coarse for the requested lambda."""


class DegenerateFamilyError(ResolutionLimitError):
    """The characteristic function vanishes identically on the region."""
