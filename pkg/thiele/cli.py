"""CLI entry point for Thiele."""

import argparse
import importlib.util
import logging
import sys
from pathlib import Path

from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape as rich_escape
from rich.panel import Panel
from rich.table import Table

from thiele.config import DEFAULT_MC_WORKERS, DEFAULT_OUTPUT_DIR
from thiele.errors import StageError, ThieleError
from thiele.intensities import INTENSITIES
from thiele.outputs import get_default_outputs
from thiele.runner import ScenarioRun, run_batch
from thiele.scenarios import SweepSpec, get_builtin, list_builtins, load_spec

logger = logging.getLogger("thiele")


def load_hook(hook_path: str):
    """Load a hook module from a file path."""
    path = Path(hook_path).resolve()
    if not path.exists():
        raise FileNotFoundError(f"Hook file not found: {hook_path}")

    # Use unique module name based on file path to avoid collisions
    module_name = f"hook_{path.stem}_{id(path)}"
    spec = importlib.util.spec_from_file_location(module_name, path)
    module = importlib.util.module_from_spec(spec)
    sys.modules[module_name] = module
    spec.loader.exec_module(module)
    return module


def parse_thetas(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--step", type=float, help="Solver step in years (overrides the scenario)")
    common.add_argument(
        "--out",
        default=DEFAULT_OUTPUT_DIR,
        help=f"Output directory (default: {DEFAULT_OUTPUT_DIR})",
    )
    common.add_argument("--mc-paths", type=int, help="Monte Carlo paths (overrides the scenario)")
    common.add_argument("--seed", type=int, help="Monte Carlo seed (overrides the scenario)")
    common.add_argument(
        "--workers",
        type=int,
        default=DEFAULT_MC_WORKERS,
        help="Threads for concurrent scenarios and Monte Carlo batches; results do not depend on it",
    )
    common.add_argument(
        "--hook",
        action="append",
        help="Path to a Python hook file (can be used multiple times)",
    )
    common.add_argument("--verbose", "-v", action="store_true", help="Show debug logs")

    parser = argparse.ArgumentParser(
        description="Thiele - reserve-dependent surrender and worst-case reserves",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", parents=[common], help="Run scenarios and write CSV tables")
    run.add_argument("spec_files", nargs="*", help="JSON scenario files")
    run.add_argument(
        "--builtin", "-b",
        action="append",
        default=[],
        help="Builtin scenario name (can be used multiple times)",
    )

    commands.add_parser("list", parents=[common], help="List builtin scenarios and models")

    sweep = commands.add_parser("sweep", parents=[common], help="Rationality sweep towards the worst case")
    sweep.add_argument("--builtin", "-b", required=True, help="Builtin scenario name")
    sweep.add_argument("--family", choices=["indicator", "exponential"], default="indicator")
    sweep.add_argument(
        "--thetas",
        type=parse_thetas,
        help="Comma-separated thetas, e.g. 0.5,1,2,5,10 (default depends on the family)",
    )
    sweep.add_argument("--psi", type=float, default=0.05, help="Fixed psi for the exponential family")
    sweep.add_argument("--psi-schedule", help="Named psi schedule, e.g. exp_sqrt")
    return parser


def setup_logging(verbose: bool, console: Console) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, show_path=verbose)],
        force=True,
    )


def apply_hooks(hooks: list) -> tuple[list, list]:
    """Merge hook SCENARIOS, INTENSITIES and REMOVE_OUTPUTS; returns (scenarios, outputs)."""
    scenarios = []
    outputs = get_default_outputs()
    for hook in hooks:
        if hasattr(hook, "SCENARIOS"):
            scenarios = scenarios + list(hook.SCENARIOS)
        if hasattr(hook, "INTENSITIES"):
            INTENSITIES.update(hook.INTENSITIES)
        if hasattr(hook, "REMOVE_OUTPUTS"):
            remove = hook.REMOVE_OUTPUTS
            outputs = [o for o in outputs if o.name not in remove]
    return scenarios, outputs


def show_builtins(console: Console, extra: list) -> None:
    table = Table(title="Builtins")
    table.add_column("Name", style="bold", no_wrap=True)
    table.add_column("Kind", no_wrap=True)
    table.add_column("Family", no_wrap=True)
    table.add_column("Description")
    for entry in list_builtins(extra):
        table.add_row(entry.name, entry.kind, entry.family or "", rich_escape(entry.description))
    console.print(table)


def show_summary(console: Console, run: ScenarioRun, paths: list[Path]) -> None:
    table = Table(show_header=True, box=None, padding=(0, 2))
    table.add_column("Reserve")
    table.add_column("t = 0", justify="right")
    for name, value in run.summary().items():
        table.add_row(name, f"{value:,.2f}")
    files = "\n".join(f"[dim]{rich_escape(str(p))}[/dim]" for p in paths)
    console.print(Panel(
        table,
        title=f"[bold]{rich_escape(run.spec.name)}[/bold]",
        subtitle=f"{len(paths)} file(s) written",
        border_style="blue",
    ))
    if files:
        console.print(files)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    console = Console()
    setup_logging(args.verbose, console)

    # Load hooks if specified
    hooks = []
    if args.hook:
        for hook_path in args.hook:
            hooks.append(load_hook(hook_path))
    extra, outputs = apply_hooks(hooks)

    if args.command == "list":
        show_builtins(console, extra)
        return 0

    overrides = {"step": args.step, "mc_paths": args.mc_paths, "seed": args.seed}
    try:
        if args.command == "sweep":
            base = get_builtin(args.builtin, extra)
            sweep = SweepSpec(
                family=args.family,
                thetas=args.thetas or (base.sweep.thetas if args.family == base.sweep.family else None),
                psi=args.psi,
                psi_schedule=args.psi_schedule,
            )
            specs = [base.with_overrides(sweep=sweep, outputs=("theta_sweep",), **overrides)]
        else:
            if not args.spec_files and not args.builtin:
                parser.error("run needs a scenario file or --builtin")
            specs = [load_spec(path) for path in args.spec_files]
            specs += [get_builtin(name, extra) for name in args.builtin]
            specs = [spec.with_overrides(**overrides) for spec in specs]

        for run, paths in run_batch(specs, args.out, console, outputs, args.workers):
            if args.command == "sweep":
                console.print(run.sweep_table.to_string(index=False))
            show_summary(console, run, paths)
    except ThieleError as e:
        title = f"[bold]{e.stage}[/bold]" if isinstance(e, StageError) else "[bold]error[/bold]"
        console.print(Panel(rich_escape(str(e)), title=title, border_style="red"))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
