"""
Shared rich console for progress output.

Everything goes to stderr so report files and the one-line summary on stdout
stay byte-reproducible. Library code prints only when called with verbose=True.
"""

from rich import box
from rich.console import Console
from rich.table import Table
from rich.text import Text

console = Console(stderr=True, highlight=False)


def progress(verbose: bool, message: str):
    if verbose:
        console.print(message)


def report_table(report, max_rows: int = 40) -> Table:
    """A rich table of the first `max_rows` rows of an ExperimentReport"""
    table = Table(title=f"{report.experiment} (seed {report.seed})", box=box.SIMPLE)
    for name in report.columns:
        table.add_column(name, justify="left" if name in ("fixture", "check", "detail") else "right")
    for row in report.rows[:max_rows]:
        table.add_row(*[Text(f"{v:.6g}" if isinstance(v, float) else str(v)) for v in row])
    if len(report.rows) > max_rows:
        table.caption = f"{len(report.rows) - max_rows} more rows"
    return table


def show_report(report, verbose: bool):
    if verbose:
        console.print(report_table(report))
        console.print(f"runtime {report.runtime:.3f}s")
