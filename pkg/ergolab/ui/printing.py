"""Centralized printing module using Rich for reports and messages.

Every human-facing line of the CLI goes through ``ReportPrinter`` so that
styling stays consistent and tests can swap in a recording console.
"""

from enum import Enum
from typing import Any, List, Optional, Sequence
import math

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from ..core.domain.intervals import ValueInterval
from ..core.domain.reports import ReportEnvelope


class PrintStyle(Enum):
    """Available print styles for messages."""
    INFO = "blue"
    WARNING = "yellow"
    ERROR = "red"
    SUCCESS = "green"
    ACCENT = "cyan"
    MUTED = "dim"
    BOLD = "bold"


def format_number(value: float, digits: int = 10) -> str:
    if math.isinf(value):
        return "+inf" if value > 0 else "-inf"
    return f"{value:.{digits}g}"


def format_interval(interval: ValueInterval) -> str:
    return f"[{format_number(interval.lower)}, {format_number(interval.upper)}]"


class ReportPrinter:
    """Rich-based printer for experiment reports."""

    def __init__(self, console: Optional[Console] = None, color: bool = True) -> None:
        self.console = console or Console(no_color=not color, highlight=False)

    def print(self, message: str, style: Optional[PrintStyle] = None) -> None:
        self.console.print(message, style=style.value if style else None)

    def print_info(self, message: str) -> None:
        self.print(message, PrintStyle.INFO)

    def print_warning(self, message: str) -> None:
        self.print(f"warning: {message}", PrintStyle.WARNING)

    def print_error(self, message: str) -> None:
        self.print(f"error: {message}", PrintStyle.ERROR)

    def print_success(self, message: str) -> None:
        self.print(message, PrintStyle.SUCCESS)

    def print_panel(self, content: str, title: Optional[str] = None, border_style: str = "blue") -> None:
        self.console.print(Panel(content, title=title, border_style=border_style, padding=(1, 2)))

    def print_table(
        self,
        title: Optional[str],
        headers: Sequence[str],
        rows: Sequence[Sequence[Any]],
        header_style: str = "bold magenta",
    ) -> Table:
        """Create and print a table."""
        table = Table(title=title, show_header=True, header_style=header_style)
        for header in headers:
            table.add_column(header)
        for row in rows:
            table.add_row(*(str(cell) for cell in row))
        self.console.print(table)
        return table

    def print_envelope(self, envelope: ReportEnvelope) -> None:
        """Verdicts and margins of one run, framed by a summary panel."""
        style = "green" if envelope.passed else "red"
        verdict = "PASS" if envelope.passed else "FAIL"
        self.print_panel(
            f"experiment: {envelope.experiment}\n"
            f"config hash: {envelope.config_hash[:16]}\n"
            f"ergolab {envelope.tool_version}\n"
            f"verdict: [{style}]{verdict}[/{style}]",
            title="ergolab report",
            border_style=style,
        )
        rows: List[List[str]] = []
        for name, passed in sorted(envelope.verdicts.items()):
            margin = envelope.margins.get(name)
            rows.append([name, "pass" if passed else "fail", format_interval(margin) if margin else ""])
        extra = sorted(set(envelope.margins) - set(envelope.verdicts))
        rows.extend([name, "", format_interval(envelope.margins[name])] for name in extra)
        self.print_table("checks", ["check", "verdict", "margin"], rows)

    def print_examples(self, entries: Sequence[Any]) -> None:
        self.print_table(
            "shipped examples",
            ["name", "experiment", "description"],
            [[e.name, e.experiment, e.description] for e in entries],
        )


_global_printer: Optional[ReportPrinter] = None


def get_printer() -> ReportPrinter:
    """Get the global printer instance."""
    global _global_printer
    if _global_printer is None:
        _global_printer = ReportPrinter()
    return _global_printer


def set_printer(printer: ReportPrinter) -> None:
    """Set a custom global printer instance."""
    global _global_printer
    _global_printer = printer
