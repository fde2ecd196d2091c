"""
pointspec - Report and Serialisation Module.

JSON serialisation of command reports. Complex numbers are written as
[re, im] pairs, numpy values as plain numbers or lists, enums by value
and dataclasses as objects, so reports can be read back by any JSON
consumer.

Output is deterministic: keys are sorted and the indent is fixed, so two
runs with identical inputs and --no-timing produce identical bytes.

Classes:
    ComplexEncoder: JSON encoder for the numeric and domain types.
    ReportWriter: Builds, serialises and saves reports; writes CSV.
"""

import csv
import dataclasses
import json
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional, Sequence, TextIO, Union

import numpy as np

from src import __version__
from src.schema import Report


class ComplexEncoder(json.JSONEncoder):
    """
    JSON encoder for complex numbers, numpy values, enums and dataclasses.

    Potentials carry a class-level `kind` tag, which is added to their
    object form.
    """

    def default(self, obj: Any) -> Any:
        """
        Encode the types json does not know.

        Args:
            obj: Object to encode.

        Returns:
            JSON-serialisable representation.
        """
        if isinstance(obj, (complex, np.complexfloating)):
            return [float(obj.real), float(obj.imag)]
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.bool_):
            return bool(obj)
        if isinstance(obj, np.ndarray):
            if not np.iscomplexobj(obj):
                return obj.tolist()
            if obj.ndim == 0:
                return self.default(obj.item())
            return [self.default(row) for row in obj]
        if isinstance(obj, Enum):
            return obj.value
        if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
            data = {field.name: getattr(obj, field.name) for field in dataclasses.fields(obj)}
            kind = getattr(type(obj), "kind", None)
            if isinstance(kind, Enum):
                data["kind"] = kind.value
            return data
        return super().default(obj)


class ReportWriter:
    """
    Builds and writes command reports.

    Example:
        >>> writer = ReportWriter()
        >>> report = writer.build({"name": "eigs"}, None, [], {"tol": 1e-10}, None)
        >>> '"version"' in writer.serialise(report)
        True
    """

    INDENT = 2

    def __init__(self, version: Optional[str] = None):
        """
        Initialises the ReportWriter.

        Args:
            version: Version identifier stamped on reports.
                     Defaults to package version.
        """
        self._version = version or __version__

    def build(
        self,
        command: Dict[str, Any],
        model: Optional[Dict[str, Any]],
        payload: Any,
        tolerances: Dict[str, Any],
        wall_time: Optional[float]
    ) -> Report:
        """Wraps a command payload in the report envelope."""
        return Report(
            command=command,
            model=model,
            results=payload,
            tolerances=tolerances,
            wall_time=wall_time,
            version=self._version,
        )

    def serialise(self, report: Report) -> str:
        """
        Serialises a report to a JSON string.

        Args:
            report: Report to serialise.

        Returns:
            JSON text with sorted keys.
        """
        # round trip through the encoder so nested dataclasses get sorted keys too
        plain = json.loads(json.dumps(report, cls=ComplexEncoder))
        return json.dumps(plain, indent=self.INDENT, sort_keys=True)

    def save_to_file(self, report: Report, file_path: Union[str, Path]) -> None:
        """
        Saves a report as JSON.

        Raises:
            PermissionError: If the file cannot be written.
        """
        file_path = Path(file_path)
        file_path.parent.mkdir(parents=True, exist_ok=True)
        file_path.write_text(self.serialise(report) + "\n", encoding="utf-8")

    def write_csv(
        self,
        rows: Iterable[Mapping[str, Any]],
        columns: Sequence[str],
        stream: TextIO
    ) -> int:
        """
        Writes rows as CSV with a header line.

        Complex cells are split by the caller into real and imaginary
        columns; remaining values are written with repr precision.

        Returns:
            Number of data rows written.
        """
        writer = csv.DictWriter(stream, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        count = 0
        for row in rows:
            writer.writerow({name: _csv_cell(row.get(name)) for name in columns})
            count += 1
        return count

    def generate_filename(self, prefix: str = "report", ext: str = "json") -> str:
        """
        Generates a timestamped filename.

        Returns:
            Filename like "report_2024-12-18_143052.json".
        """
        timestamp = datetime.now().strftime("%Y-%m-%d_%H%M%S")
        return f"{prefix}_{timestamp}.{ext}"


def _csv_cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value
