import logging
from pathlib import Path

from rich import box
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from mixedtraces import __version__
from mixedtraces.experiments import SUMMARY_ITEMS, ResultBundle, Status

console = Console()

STATUS_STYLE = {
    Status.PASS.value: "green",
    Status.FAIL.value: "bold red",
    Status.INCONCLUSIVE.value: "yellow",
}

WELCOME_PATH = Path(__file__).parent / "static" / "welcome.txt"


def setup_logging(verbose: bool = False):
    """Route library logging through rich on the shared console."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, show_path=False, markup=False)],
        force=True,
    )


def welcome_panel(experiment: str, fixture: str) -> Panel:
    with open(WELCOME_PATH, "r") as f:
        welcome_ascii = f.read()
    content = f"{welcome_ascii}\n"
    content += f"[bold green]mixedtraces {__version__}[/bold green]\n\n"
    content += f"[bold]Experiment:[/bold] {experiment}    [bold]Fixture:[/bold] {fixture}"
    return Panel(content, border_style="green", padding=(1, 2), title="mixedtraces")


def summary_table(bundle: ResultBundle) -> Table:
    table = Table(box=box.SIMPLE_HEAD, show_header=True, header_style="bold magenta")
    table.add_column("Item", style="cyan")
    table.add_column("Criterion", justify="center")
    table.add_column("Status", justify="center")
    for item, status in bundle.summary.items():
        table.add_row(item, SUMMARY_ITEMS.get(item, ""), f"[{STATUS_STYLE[status]}]{status}[/]")
    return table


def tables_table(bundle: ResultBundle) -> Table:
    table = Table(box=box.SIMPLE_HEAD, show_header=True, header_style="bold magenta")
    table.add_column("Table", style="cyan")
    table.add_column("SHA-256", style="dim")
    for name, digest in sorted(bundle.table_hashes.items()):
        table.add_row(name, digest[:16])
    return table


def display_bundle(bundle: ResultBundle):
    console.print(Panel(summary_table(bundle), title="Summary", border_style="cyan", padding=(1, 2)))
    console.print(tables_table(bundle))
    console.print(
        f"Bundle: [bold]{bundle.out_dir}[/bold]  manifest {bundle.manifest['manifest_hash'][:16]}  "
        f"({bundle.manifest['wall_clock']['elapsed_s']:.1f} s)"
    )
