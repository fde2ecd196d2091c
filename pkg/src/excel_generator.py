"""
pointspec - Excel Export Module.

Writes eigenvalue reports and a-plane phase diagrams to xlsx workbooks
for inspection outside the command line. Complex values are split into
real and imaginary columns.

Classes:
    SpectrumWorkbook: Generates workbooks from reports and phase cells.
"""

from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from openpyxl import Workbook
from openpyxl.styles import (
    Alignment,
    Border,
    Font,
    PatternFill,
    Side,
)
from openpyxl.utils import get_column_letter
from openpyxl.worksheet.worksheet import Worksheet

from src.schema import Eigenvalue, PhaseCell, PhaseClass, Report, SingularityRecord


class SpectrumWorkbook:
    """
    Generates xlsx workbooks for spectra and phase diagrams.

    Example:
        >>> workbook = SpectrumWorkbook()
        >>> workbook.write_phase_diagram(cells, "phase.xlsx")
    """

    NUMBER_FORMAT = "0.000000000000"

    # Phase-class colours
    REAL_FILL = PatternFill(start_color="C6EFCE", end_color="C6EFCE", fill_type="solid")
    NONREAL_FILL = PatternFill(start_color="FFEB9C", end_color="FFEB9C", fill_type="solid")
    SINGULAR_FILL = PatternFill(start_color="FFC7CE", end_color="FFC7CE", fill_type="solid")

    HEADER_FONT = Font(bold=True, color="FFFFFF")
    HEADER_FILL = PatternFill(start_color="2F5496", end_color="2F5496", fill_type="solid")
    HEADER_ALIGNMENT = Alignment(horizontal="center", vertical="center")

    THIN_BORDER = Border(
        left=Side(style="thin"),
        right=Side(style="thin"),
        top=Side(style="thin"),
        bottom=Side(style="thin")
    )

    EIGENVALUE_HEADERS = [
        "Re lambda", "Im lambda", "Re k", "Im k",
        "Geometric", "Algebraic", "Residual",
    ]
    SINGULARITY_HEADERS = ["lambda", "k", "Re W+", "Im W+", "Singular"]
    PHASE_HEADERS = ["Re a", "Im a", "Eigenvalues", "Real eigenvalue", "Singular", "Class"]

    def write_spectrum(self, report: Report, output_path: Union[str, Path]) -> None:
        """
        Writes an eigenvalue report.

        Creates a Summary sheet, an Eigenvalues sheet and, when the
        results carry singularity records, a Singularities sheet.

        Args:
            report: Report whose results hold Eigenvalue records under
                "eigenvalues" (and optionally SingularityRecord records
                under "singularities").
            output_path: Path of the .xlsx file.
        """
        results = report.results if isinstance(report.results, dict) else {}
        eigenvalues: List[Eigenvalue] = list(results.get("eigenvalues", []))
        singularities: List[SingularityRecord] = list(results.get("singularities", []))

        workbook = self._new_workbook()
        self._create_summary_sheet(workbook, report, len(eigenvalues), len(singularities))

        ws = workbook.create_sheet("Eigenvalues")
        self._write_headers(ws, self.EIGENVALUE_HEADERS)
        for row_idx, ev in enumerate(eigenvalues, start=2):
            lam, k = complex(ev.lam), complex(ev.k)
            self._write_row(ws, row_idx, [
                lam.real, lam.imag, k.real, k.imag,
                ev.geometric_mult, ev.algebraic_mult, ev.residual,
            ])
            if ev.algebraic_mult > ev.geometric_mult:
                self._fill_row(ws, row_idx, len(self.EIGENVALUE_HEADERS), self.NONREAL_FILL)
        self._auto_adjust_columns(ws)

        if singularities:
            ws = workbook.create_sheet("Singularities")
            self._write_headers(ws, self.SINGULARITY_HEADERS)
            for row_idx, record in enumerate(singularities, start=2):
                a_plus = complex(record.a_plus)
                self._write_row(ws, row_idx, [
                    record.lam, record.k, a_plus.real, a_plus.imag,
                    "yes" if record.is_singular else "no",
                ])
                if record.is_singular:
                    self._fill_row(ws, row_idx, len(self.SINGULARITY_HEADERS), self.SINGULAR_FILL)
            self._auto_adjust_columns(ws)

        self._save(workbook, output_path)

    def write_phase_diagram(self, cells: Sequence[PhaseCell], output_path: Union[str, Path]) -> None:
        """
        Writes one row per a-plane cell, filled by class.

        Args:
            cells: Phase cells in grid order.
            output_path: Path of the .xlsx file.
        """
        workbook = self._new_workbook()
        ws = workbook.create_sheet("Phase Diagram")
        self._write_headers(ws, self.PHASE_HEADERS)
        for row_idx, cell in enumerate(cells, start=2):
            a = complex(cell.a)
            self._write_row(ws, row_idx, [
                a.real, a.imag, cell.eigenvalue_count,
                "yes" if cell.has_real_eigenvalue else "no",
                "yes" if cell.singular else "no",
                cell.label.value,
            ])
            fill = self._get_phase_fill(cell.label)
            if fill:
                self._fill_row(ws, row_idx, len(self.PHASE_HEADERS), fill)
        self._auto_adjust_columns(ws)
        self._save(workbook, output_path)

    @staticmethod
    def _new_workbook() -> Workbook:
        workbook = Workbook()
        workbook.remove(workbook.active)
        return workbook

    @staticmethod
    def _save(workbook: Workbook, output_path: Union[str, Path]) -> None:
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        workbook.save(output_path)

    def _create_summary_sheet(
        self,
        workbook: Workbook,
        report: Report,
        eigenvalue_count: int,
        singularity_count: int
    ) -> None:
        """Creates the Summary sheet with the command and model echo."""
        ws = workbook.create_sheet("Summary")
        ws["A1"] = "pointspec - Spectrum Summary"
        ws["A1"].font = Font(bold=True, size=16)

        rows: List[List[Any]] = [
            ["Command:", str(report.command.get("name", ""))],
            ["Version:", report.version],
            ["Model:", _describe_model(report.model)],
            ["Eigenvalues:", eigenvalue_count],
        ]
        if singularity_count:
            rows.append(["Singularity records:", singularity_count])
        if report.wall_time is not None:
            rows.append(["Wall time (s):", report.wall_time])
        for row_idx, (label, value) in enumerate(rows, start=3):
            ws.cell(row=row_idx, column=1, value=label).font = Font(bold=True)
            ws.cell(row=row_idx, column=2, value=value)

        tol_row = len(rows) + 4
        ws.cell(row=tol_row, column=1, value="TOLERANCES").font = Font(bold=True, size=14)
        for offset, name in enumerate(sorted(report.tolerances), start=1):
            ws.cell(row=tol_row + offset, column=1, value=name)
            ws.cell(row=tol_row + offset, column=2, value=report.tolerances[name])
        self._auto_adjust_columns(ws)

    def _write_headers(self, ws: Worksheet, headers: Sequence[str]) -> None:
        for col, header in enumerate(headers, start=1):
            cell = ws.cell(row=1, column=col, value=header)
            cell.font = self.HEADER_FONT
            cell.fill = self.HEADER_FILL
            cell.alignment = self.HEADER_ALIGNMENT
            cell.border = self.THIN_BORDER

    def _write_row(self, ws: Worksheet, row_idx: int, values: Sequence[Any]) -> None:
        for col_idx, value in enumerate(values, start=1):
            cell = ws.cell(row=row_idx, column=col_idx, value=value)
            cell.border = self.THIN_BORDER
            if isinstance(value, float):
                cell.number_format = self.NUMBER_FORMAT

    @staticmethod
    def _fill_row(ws: Worksheet, row_idx: int, width: int, fill: PatternFill) -> None:
        for col_idx in range(1, width + 1):
            ws.cell(row=row_idx, column=col_idx).fill = fill

    def _get_phase_fill(self, label: PhaseClass) -> Optional[PatternFill]:
        """
        Returns the fill colour for a phase class.

        Returns:
            PatternFill for the class, or None for NO_EIGENVALUE.
        """
        if label == PhaseClass.REAL_EIGENVALUE:
            return self.REAL_FILL
        elif label == PhaseClass.NONREAL_EIGENVALUE:
            return self.NONREAL_FILL
        elif label == PhaseClass.SINGULARITY:
            return self.SINGULAR_FILL
        return None

    def _auto_adjust_columns(self, worksheet: Worksheet) -> None:
        """Sets each column width from its longest value."""
        for col_idx in range(1, worksheet.max_column + 1):
            max_length = 0
            for row_idx in range(1, worksheet.max_row + 1):
                value = worksheet.cell(row=row_idx, column=col_idx).value
                if value is not None:
                    max_length = max(max_length, len(str(value)))
            worksheet.column_dimensions[get_column_letter(col_idx)].width = max(max_length + 2, 10)

    def generate_filename(self, prefix: str = "spectrum") -> str:
        """
        Generates a timestamped filename for workbooks.

        Returns:
            Filename like "spectrum_2024-12-18_143052.xlsx".
        """
        timestamp = datetime.now().strftime("%Y-%m-%d_%H%M%S")
        return f"{prefix}_{timestamp}.xlsx"


def _describe_model(model: Optional[Dict[str, Any]]) -> str:
    if not model:
        return "-"
    case = model.get("case", "")
    if case == "delta":
        return f"delta, a={model.get('a')}, q={model.get('q', {}).get('kind', '?')}"
    kinds = [model.get(name, {}).get("kind", "?") for name in ("q1", "q2")]
    return f"general, q1={kinds[0]}, q2={kinds[1]}"
