"""Shipped example experiment configs."""

from dataclasses import dataclass
from pathlib import Path
from typing import List

from ..config.experiment import ExperimentConfig
from ..core.interfaces.base import ConfigurationError

EXAMPLES_DIR = Path(__file__).resolve().parent


@dataclass(frozen=True)
class ExampleEntry:
    name: str
    path: Path
    experiment: str
    description: str


def list_examples() -> List[ExampleEntry]:
    """Every shipped config with its one-line provenance, sorted by name."""
    entries = []
    for path in sorted(EXAMPLES_DIR.glob("*.toml")):
        config = ExperimentConfig.load(path)
        entries.append(ExampleEntry(path.stem, path, config.experiment, config.description))
    return entries


def example_path(name: str) -> Path:
    path = EXAMPLES_DIR / f"{name}.toml"
    if not path.exists():
        known = ", ".join(e.name for e in list_examples())
        raise ConfigurationError(f"Unknown example '{name}'; shipped examples: {known}")
    return path
