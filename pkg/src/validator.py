"""
pointspec - Model Document Validation Module.

This module parses JSON model documents into validated ModelSpec values.
Schema violations (missing fields, wrong shapes) stop parsing at the first
offending field with a ParseError carrying its path. Invariant violations
(non-positive widths, complex amplitude of an even box, unordered nodes)
are all collected first and raised together as one ValidationError.

Document Format:
    - {"case": "delta", "a": [re, im], "q": {...}}
    - {"case": "general", "T": {"a": .., "b": .., "c": .., "d": ..},
       "q1": {...}, "q2": {...}}
    - Potentials: {"kind": "zero" | "box_even" | "box_odd_sign" |
      "exp_even" | "sampled", ...kind-specific fields}
    - Complex numbers are always [re, im]; real fields accept a number

Classes:
    ValidationIssue: One invariant violation with its field path.
    ValidationReport: Container for a validation pass.
    ModelValidator: Parser and invariant checker for model documents.

Functions:
    parse_model: Parses a document text into a ModelSpec.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from src.errors import ParseError, ValidationError
from src.schema import (
    BoxEven,
    BoxOddSign,
    CouplingMatrix,
    DeltaModel,
    ExpEven,
    GeneralModel,
    ModelSpec,
    Potential,
    PotentialKind,
    SampledPotential,
    ZeroPotential,
)


@dataclass
class ValidationIssue:
    """
    A single invariant violation.

    Attributes:
        field_path: Dotted path of the field, e.g. "q1.rho".
        value: Offending value as text.
        message: Human-readable explanation.
    """

    field_path: str
    value: str
    message: str

    def __str__(self) -> str:
        return f"Error: '{self.field_path}' = {self.value} - {self.message}"


@dataclass
class ValidationReport:
    """
    Outcome of checking a model's invariants.

    Attributes:
        model: The model that was checked.
        issues: All violations found.
    """

    model: Optional[ModelSpec] = None
    issues: List[ValidationIssue] = field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        return len(self.issues) == 0

    @property
    def error_count(self) -> int:
        return len(self.issues)


class ModelValidator:
    """
    Parses and validates model documents.

    Example:
        >>> validator = ModelValidator()
        >>> model = validator.parse_text(
        ...     '{"case": "delta", "a": [-2, 0], "q": {"kind": "zero"}}'
        ... )
        >>> model.a
        (-2+0j)
    """

    SUPPORTED_CASES = ("delta", "general")
    COUPLING_ENTRIES = ("a", "b", "c", "d")
    POTENTIAL_FIELDS = {
        PotentialKind.ZERO: (),
        PotentialKind.BOX_EVEN: ("Z", "rho"),
        PotentialKind.BOX_ODD_SIGN: ("Z", "rho"),
        PotentialKind.EXP_EVEN: ("c", "mu"),
        PotentialKind.SAMPLED: ("nodes", "values"),
    }

    def parse_file(self, file_path: Union[str, Path]) -> ModelSpec:
        """
        Reads and parses a model document from disk.

        Raises:
            ParseError: If the file is missing or malformed.
            ValidationError: If invariants are violated.
        """
        file_path = Path(file_path)
        if not file_path.exists():
            raise ParseError("$", f"model file not found: {file_path}")
        return self.parse_text(file_path.read_text(encoding="utf-8"))

    def parse_text(self, text: str) -> ModelSpec:
        """Parses a JSON document text into a ModelSpec."""
        try:
            document = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError("$", f"invalid JSON: {exc.msg} at line {exc.lineno}")
        return self.parse_document(document)

    def parse_document(self, document: Any) -> ModelSpec:
        """
        Converts a decoded JSON document into a validated ModelSpec.

        Args:
            document: Decoded JSON object.

        Returns:
            DeltaModel or GeneralModel.

        Raises:
            ParseError: On the first schema violation.
            ValidationError: With every invariant violation found.
        """
        if not isinstance(document, dict):
            raise ParseError("$", "document must be a JSON object")
        case = document.get("case")
        if case not in self.SUPPORTED_CASES:
            raise ParseError(
                "case", f"must be one of {', '.join(self.SUPPORTED_CASES)}"
            )

        if case == "delta":
            a = self._complex(self._require(document, "a", "a"), "a")
            q = self.parse_potential(self._require(document, "q", "q"), "q")
            model: ModelSpec = DeltaModel(a=a, q=q)
        else:
            entries = self._require(document, "T", "T")
            if not isinstance(entries, dict):
                raise ParseError("T", "must be an object with entries a, b, c, d")
            values = {
                name: self._complex(self._require(entries, name, f"T.{name}"), f"T.{name}")
                for name in self.COUPLING_ENTRIES
            }
            model = GeneralModel(
                coupling=CouplingMatrix(**values),
                q1=self.parse_potential(self._require(document, "q1", "q1"), "q1"),
                q2=self.parse_potential(self._require(document, "q2", "q2"), "q2"),
            )

        report = self.validate(model)
        if not report.is_valid:
            raise ValidationError([str(issue) for issue in report.issues])
        return model

    def parse_potential_text(self, text: str) -> Potential:
        """
        Parses a potential document.

        Accepts a bare potential object or a delta-model document, whose
        "q" field is used.

        Raises:
            ParseError: On schema violations.
            ValidationError: On invariant violations.
        """
        try:
            document = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError("$", f"invalid JSON: {exc.msg} at line {exc.lineno}")
        if isinstance(document, dict) and "kind" not in document and "q" in document:
            document, path = document["q"], "q"
        else:
            path = "$"
        potential = self.parse_potential(document, path)
        issues = self._potential_issues(potential, path)
        if issues:
            raise ValidationError([str(issue) for issue in issues])
        return potential

    def parse_potential(self, document: Any, path: str) -> Potential:
        """
        Converts a potential object into a descriptor (schema checks only).

        Args:
            document: Decoded potential object.
            path: Field path used in error messages.

        Raises:
            ParseError: On schema violations.
        """
        if not isinstance(document, dict):
            raise ParseError(path, "potential must be an object with a 'kind'")
        try:
            kind = PotentialKind(document.get("kind"))
        except ValueError:
            allowed = ", ".join(kind.value for kind in PotentialKind)
            raise ParseError(f"{path}.kind", f"must be one of {allowed}")

        for name in self.POTENTIAL_FIELDS[kind]:
            self._require(document, name, f"{path}.{name}")

        if kind is PotentialKind.ZERO:
            return ZeroPotential()
        if kind is PotentialKind.BOX_EVEN:
            z = self._complex(document["Z"], f"{path}.Z")
            return BoxEven(
                z=z.real if z.imag == 0 else z,
                rho=self._real(document["rho"], f"{path}.rho"),
            )
        if kind is PotentialKind.BOX_ODD_SIGN:
            return BoxOddSign(
                z=self._complex(document["Z"], f"{path}.Z"),
                rho=self._real(document["rho"], f"{path}.rho"),
            )
        if kind is PotentialKind.EXP_EVEN:
            return ExpEven(
                c=self._complex(document["c"], f"{path}.c"),
                mu=self._real(document["mu"], f"{path}.mu"),
            )

        nodes = document["nodes"]
        values = document["values"]
        if not isinstance(nodes, list):
            raise ParseError(f"{path}.nodes", "must be a list of numbers")
        if not isinstance(values, list):
            raise ParseError(f"{path}.values", "must be a list of [re, im] pairs")
        return SampledPotential(
            nodes=tuple(
                self._real(node, f"{path}.nodes[{i}]") for i, node in enumerate(nodes)
            ),
            values=tuple(
                self._complex(value, f"{path}.values[{i}]")
                for i, value in enumerate(values)
            ),
        )

    def validate(self, model: ModelSpec) -> ValidationReport:
        """
        Checks every invariant of a model.

        Args:
            model: Model to check.

        Returns:
            ValidationReport listing all violations.
        """
        report = ValidationReport(model=model)
        if isinstance(model, DeltaModel):
            self._check_finite(model.a, "a", report.issues)
            report.issues.extend(self._potential_issues(model.q, "q"))
        else:
            for name in self.COUPLING_ENTRIES:
                self._check_finite(getattr(model.coupling, name), f"T.{name}", report.issues)
            report.issues.extend(self._potential_issues(model.q1, "q1"))
            report.issues.extend(self._potential_issues(model.q2, "q2"))
        return report

    def _potential_issues(self, potential: Potential, path: str) -> List[ValidationIssue]:
        """Returns invariant violations of a single potential."""
        issues: List[ValidationIssue] = []

        if isinstance(potential, (BoxEven, BoxOddSign)):
            self._check_finite(potential.z, f"{path}.Z", issues)
            self._check_positive(potential.rho, f"{path}.rho", issues)
            if isinstance(potential, BoxEven) and complex(potential.z).imag != 0:
                issues.append(ValidationIssue(
                    field_path=f"{path}.Z",
                    value=str(potential.z),
                    message="even box amplitude must be real",
                ))
        elif isinstance(potential, ExpEven):
            self._check_finite(potential.c, f"{path}.c", issues)
            self._check_positive(potential.mu, f"{path}.mu", issues)
        elif isinstance(potential, SampledPotential):
            nodes = potential.nodes
            if len(nodes) < 2:
                issues.append(ValidationIssue(
                    field_path=f"{path}.nodes",
                    value=str(len(nodes)),
                    message="at least two nodes are required",
                ))
            if len(potential.values) != len(nodes):
                issues.append(ValidationIssue(
                    field_path=f"{path}.values",
                    value=str(len(potential.values)),
                    message=f"expected {len(nodes)} values, one per node",
                ))
            for i, node in enumerate(nodes):
                self._check_finite(node, f"{path}.nodes[{i}]", issues)
            for i, (left, right) in enumerate(zip(nodes, nodes[1:])):
                if not right > left:
                    issues.append(ValidationIssue(
                        field_path=f"{path}.nodes[{i + 1}]",
                        value=str(right),
                        message="nodes must be strictly increasing",
                    ))
            for i, value in enumerate(potential.values):
                self._check_finite(value, f"{path}.values[{i}]", issues)

        return issues

    def _check_finite(self, value: complex, path: str, issues: List[ValidationIssue]) -> None:
        value = complex(value)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            issues.append(ValidationIssue(path, str(value), "must be finite"))

    def _check_positive(self, value: float, path: str, issues: List[ValidationIssue]) -> None:
        if not (math.isfinite(value) and value > 0):
            issues.append(ValidationIssue(path, str(value), "must be a positive real"))

    def _require(self, document: Dict[str, Any], name: str, path: str) -> Any:
        if name not in document:
            raise ParseError(path, "required field is missing")
        return document[name]

    def _real(self, value: Any, path: str) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError(path, "must be a number")
        return float(value)

    def _complex(self, value: Any, path: str) -> complex:
        if isinstance(value, list):
            if len(value) != 2:
                raise ParseError(path, "complex numbers are written as [re, im]")
            return complex(self._real(value[0], path), self._real(value[1], path))
        return complex(self._real(value, path), 0.0)


def parse_model(text: str) -> ModelSpec:
    """Parses a model document text; see ModelValidator.parse_document."""
    return ModelValidator().parse_text(text)
