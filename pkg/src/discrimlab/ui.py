"""
UI Module - Console output for discrimlab

Status messages go to stderr so that reports printed on stdout stay
machine-readable.
"""
from typing import List

from rich.box import ROUNDED
from rich.console import Console
from rich.markup import escape
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table
from rich.theme import Theme

from .export import format_value

# Custom theme
DISCRIMLAB_THEME = Theme({
    "info": "cyan",
    "warning": "yellow",
    "error": "bold red",
    "success": "bold green",
    "pass": "green",
    "fail": "bold red",
    "muted": "dim",
})

console = Console(theme=DISCRIMLAB_THEME, stderr=True)
report_console = Console(theme=DISCRIMLAB_THEME)

# Wide reports are cut to this many columns on the terminal
MAX_TABLE_COLUMNS = 12


def print_progress(message: str = "Running"):
    """Transient spinner shown while an experiment runs"""
    return Progress(
        SpinnerColumn(),
        TextColumn(f"[dim]{escape(message)}...[/dim]"),
        transient=True,
        console=console,
    )


def print_error(message: str):
    """Print error message"""
    console.print(f"[error]Error:[/error] {escape(str(message))}")


def print_success(message: str):
    console.print(f"[success]✓[/success] {escape(str(message))}")


def print_info(message: str):
    console.print(f"[info]ℹ[/info] {escape(str(message))}")


def print_warning(message: str):
    console.print(f"[warning]⚠[/warning] {escape(str(message))}")


def _cell(column: str, value) -> str:
    text = escape(format_value(value))
    if column == "passed" and value is not None:
        return f"[pass]{text}[/pass]" if value else f"[fail]{text}[/fail]"
    return text


def print_report(command: str, columns: List[str], rows: List[dict]):
    """Render report rows as a table on stdout"""
    if not rows:
        report_console.print("[muted]No rows.[/muted]")
        return

    shown = columns[:MAX_TABLE_COLUMNS]
    if "passed" in columns and "passed" not in shown:
        shown = shown[:-1] + ["passed"]

    table = Table(title=command, box=ROUNDED, title_style="bold cyan")
    for column in shown:
        justify = "left" if column in ("label", "error", "mu_t", "mu_t_tilde", "mu_eta", "mu_eta_tilde") else "right"
        table.add_column(column, style="white", justify=justify)

    for row in rows:
        table.add_row(*[_cell(column, row.get(column)) for column in shown])

    report_console.print(table)
    if len(shown) < len(columns):
        hidden = len(columns) - len(shown)
        console.print(f"[muted]{hidden} more column(s); use --out to write the full report.[/muted]")


def print_summary(passed: bool, failures: int, total: int):
    """One-line certification verdict"""
    if passed:
        print_success(f"All checks passed ({total} row(s))")
    elif failures:
        print_warning(f"{failures} of {total} row(s) failed their tolerance")
    else:
        print_warning("Run failed its acceptance criterion")
