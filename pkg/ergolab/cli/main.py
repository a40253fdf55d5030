"""Main CLI entry point for ergolab."""

from pathlib import Path
from typing import Any, Dict, Optional
import logging
import os

import typer
from pydantic import ValidationError

from ..config.experiment import ExperimentConfig, read_document
from ..config.settings import AppSettings, load_settings
from ..core.interfaces.base import BudgetExceededError, ConfigurationError, ErgolabError
from ..core.interfaces.report_store import LockError
from ..examples import example_path, list_examples
from ..infrastructure.reports import JsonReportStore
from ..ui.printing import get_printer
from .commands import effective_settings, run_experiment

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3

EXPERIMENTS = {
    "pressure": "Partition sums and pressure against the spectral oracle.",
    "certify": "Specification, Bowen and pressure-gap certificate for a decomposition.",
    "gibbs": "Gibbs bounds and the upper energy bound for the equilibrium state.",
    "entropy": "Partition entropy, Stirling and Hamming checks.",
    "flow-pressure": "Suspension flow pressure, Abramov and time-t ball checks.",
    "ldp": "Empirical decay rates against the variational large-deviation bound.",
    "glue": "Exhaustive specification gluing of segment tuples.",
    "decompose": "(p, g, s) decompositions of segments.",
}

# config sections that can be replaced from a separate TOML fragment
FRAGMENTS = ("system", "potential", "decomposition", "roof", "constraint")

app = typer.Typer(
    name="ergolab",
    help="Ergolab - executable thermodynamic formalism for shifts and suspension flows.",
    add_completion=False,
)


def setup_logging(verbose: bool, log_path: Optional[Path] = None) -> None:
    """Setup logging configuration."""
    level = logging.DEBUG if verbose else logging.INFO
    handlers: list = [logging.StreamHandler() if verbose else logging.NullHandler()]
    if log_path is not None:
        log_path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_path))
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True,
    )


def _validation_message(error: ValidationError) -> str:
    lines = []
    for item in error.errors():
        path = ".".join(str(part) for part in item["loc"]) or "config"
        lines.append(f"{path}: {item['msg']}")
    return "; ".join(lines)


def _execute(data: Dict[str, Any], out: Optional[Path], budget: Optional[int], verbose: bool) -> None:
    """Validate, run, persist and print one experiment; exits with the verdict code."""
    printer = get_printer()
    settings: AppSettings = load_settings()
    env_budget = bool(os.getenv("ERGOLAB_BUDGET"))
    if budget is not None:
        settings.budget.word_budget = budget
        env_budget = True
    verbose = verbose or settings.ui.verbose

    target = Path(out) if out is not None else Path(settings.reports.output_dir)
    root, name = (target.parent, target.name) if target.suffix == ".json" else (target, None)
    setup_logging(verbose, root / settings.reports.log_file)
    try:
        config = ExperimentConfig.model_validate(data)
        settings = effective_settings(config, settings, env_budget)
        store = JsonReportStore(root, settings.reports.lock_name, settings.reports.write_csv)
        envelope = run_experiment(config, settings, store, name)
    except ValidationError as e:
        printer.print_error(f"invalid config: {_validation_message(e)}")
        raise typer.Exit(EXIT_CONFIG)
    except BudgetExceededError as e:
        printer.print_error(f"budget exceeded: {e}")
        raise typer.Exit(EXIT_BUDGET)
    except (ConfigurationError, LockError) as e:
        printer.print_error(str(e))
        raise typer.Exit(EXIT_CONFIG)
    except ErgolabError as e:
        printer.print_error(f"{type(e).__name__}: {e}")
        raise typer.Exit(EXIT_FAIL)

    printer.print_envelope(envelope)
    failed = sorted(name for name, ok in envelope.verdicts.items() if not ok)
    if failed:
        printer.print_warning(f"failed checks: {', '.join(failed)}")
    else:
        printer.print_success("all checks passed")
    printer.print_info(f"Reports written to {root}")
    raise typer.Exit(EXIT_PASS if envelope.passed else EXIT_FAIL)


def _load(path: Optional[Path]) -> Dict[str, Any]:
    if path is None:
        return {}
    try:
        return read_document(path)
    except ConfigurationError as e:
        get_printer().print_error(str(e))
        raise typer.Exit(EXIT_CONFIG)


def _register(experiment: str, help_text: str) -> None:
    def command(
        config: Optional[Path] = typer.Option(None, "--config", "-c", help="Experiment TOML/YAML file"),
        system: Optional[Path] = typer.Option(None, "--system", help="TOML file with the [system] table"),
        potential: Optional[Path] = typer.Option(None, "--potential", help="TOML file with the [potential] table"),
        decomposition: Optional[Path] = typer.Option(None, "--decomposition", help="TOML file with the [decomposition] table"),
        roof: Optional[Path] = typer.Option(None, "--roof", help="TOML file with the [roof] table"),
        constraint: Optional[Path] = typer.Option(None, "--constraint", help="TOML file with the [constraint] table"),
        nmax: Optional[int] = typer.Option(None, "--nmax", help="Largest word length n"),
        delta: Optional[str] = typer.Option(None, "--delta", help="Separation scale, e.g. 2^-3 (pressure, certify)"),
        eps: Optional[str] = typer.Option(None, "--eps", help="Weight scale, e.g. 2^-1 (pressure, certify)"),
        rho: Optional[str] = typer.Option(None, "--rho", help="Ball scale of the lower Gibbs check (gibbs, entropy)"),
        measure: Optional[str] = typer.Option(None, "--measure", help="rpf or empirical:n (gibbs, entropy)"),
        t_max: Optional[int] = typer.Option(None, "--t-max", help="Largest flow time (flow-pressure)"),
        grid: Optional[str] = typer.Option(None, "--grid", help="Flow time grid, e.g. 1/8 (flow-pressure)"),
        out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory or report .json path"),
        budget: Optional[int] = typer.Option(None, "--budget", help="Word budget (overrides ERGOLAB_BUDGET)"),
        verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable verbose logging"),
    ) -> None:
        data = _load(config)
        data["experiment"] = experiment
        fragments = {"system": system, "potential": potential, "decomposition": decomposition,
                     "roof": roof, "constraint": constraint}
        for section in FRAGMENTS:
            if fragments[section] is not None:
                fragment = _load(fragments[section])
                data[section] = fragment.get(section, fragment)
        overrides = {
            ("budgets", "n_max"): nmax,
            ("budgets", "t_max"): t_max,
            ("scales", "delta"): delta,
            ("scales", "eps"): eps,
            ("checks", "rho"): rho,
            ("checks", "measure"): measure,
            ("flow", "grid"): grid,
        }
        for (section, key), value in overrides.items():
            if value is not None:
                data.setdefault(section, {})[key] = value
        _execute(data, out, budget, verbose)

    command.__doc__ = help_text
    app.command(name=experiment)(command)


for _name, _help in EXPERIMENTS.items():
    _register(_name, _help)


@app.command()
def run(
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="Experiment TOML/YAML file"),
    example: Optional[str] = typer.Option(None, "--example", "-e", help="Name of a shipped example"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory or report .json path"),
    budget: Optional[int] = typer.Option(None, "--budget", help="Word budget (overrides ERGOLAB_BUDGET)"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable verbose logging"),
) -> None:
    """Run whatever experiment a config file names."""
    if (config is None) == (example is None):
        get_printer().print_error("give exactly one of --config or --example")
        raise typer.Exit(EXIT_CONFIG)
    if example is not None:
        try:
            config = example_path(example)
        except ConfigurationError as e:
            get_printer().print_error(str(e))
            raise typer.Exit(EXIT_CONFIG)
    _execute(_load(config), out, budget, verbose)


@app.command()
def examples() -> None:
    """List the shipped example configs."""
    get_printer().print_examples(list_examples())


def cli_main() -> None:
    """Entry point for the CLI application."""
    app()


if __name__ == "__main__":
    cli_main()
