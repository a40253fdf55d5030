"""Configuration settings for ergolab."""

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict
import logging
import os

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

DEFAULT_WORD_BUDGET = 2 ** 24


@dataclass
class BudgetSettings:
    """Enumeration budgets."""
    word_budget: int = DEFAULT_WORD_BUDGET
    n_max: int = 14
    t_max: int = 30


@dataclass
class NumericsSettings:
    """Tolerances and numerical limits."""
    metric_horizon: int = 64
    eigen_residual: float = 1e-12
    power_tolerance: float = 1e-13
    power_iterations: int = 100_000
    gibbs_q_budget: float = 1e3
    spectral_gap_warning: float = 1e-6
    bisection_tolerance: float = 1e-10
    variational_tolerance: float = 1e-9
    entropy_tolerance: float = 1e-3
    abramov_tolerance: float = 0.03
    flow_horizon: int = 10_000
    flow_grid_divisor: int = 4
    time_ball_pairs: int = 200
    monte_carlo_samples: int = 20_000
    seed: int = 0


@dataclass
class ReportSettings:
    """Report output settings."""
    output_dir: str = "ergolab-output"
    write_csv: bool = True
    lock_name: str = ".ergolab.lock"
    log_file: str = "ergolab.log"


@dataclass
class UISettings:
    """UI settings."""
    color: bool = True
    verbose: bool = False


@dataclass
class AppSettings:
    """Main application settings."""
    budget: BudgetSettings = field(default_factory=BudgetSettings)
    numerics: NumericsSettings = field(default_factory=NumericsSettings)
    reports: ReportSettings = field(default_factory=ReportSettings)
    ui: UISettings = field(default_factory=UISettings)

    def apply_env(self) -> "AppSettings":
        """Override fields from ERGOLAB_* environment variables."""
        budget = os.getenv("ERGOLAB_BUDGET")
        if budget:
            try:
                self.budget.word_budget = int(budget)
            except ValueError:
                logger.warning(f"Ignoring non-integer ERGOLAB_BUDGET={budget!r}")
        if os.getenv("ERGOLAB_VERBOSE"):
            self.ui.verbose = os.getenv("ERGOLAB_VERBOSE", "").lower() in ("1", "true", "yes")
        if os.getenv("ERGOLAB_OUTPUT_DIR"):
            self.reports.output_dir = os.getenv("ERGOLAB_OUTPUT_DIR", self.reports.output_dir)
        return self

    @classmethod
    def load_from_env(cls) -> "AppSettings":
        """Load settings from environment variables."""
        return cls().apply_env()

    @classmethod
    def load_from_file(cls, config_path: Path) -> "AppSettings":
        """Load settings from a TOML file; unknown keys are ignored."""
        import toml

        if not config_path.exists():
            return cls()

        try:
            config_data = toml.load(config_path)
        except (OSError, toml.TomlDecodeError) as e:
            logger.warning(f"Could not load config file {config_path}: {e}")
            return cls()

        settings = cls()
        for section in ("budget", "numerics", "reports", "ui"):
            target = getattr(settings, section)
            for key, value in config_data.get(section, {}).items():
                if hasattr(target, key):
                    setattr(target, key, value)
                else:
                    logger.warning(f"Unknown setting {section}.{key} in {config_path}")
        return settings

    def save_to_file(self, config_path: Path) -> None:
        """Save settings to a TOML file."""
        import toml

        config_path.parent.mkdir(parents=True, exist_ok=True)
        with open(config_path, "w") as f:
            toml.dump(self.to_dict(), f)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def get_config_path() -> Path:
    """Get the path to the settings file."""
    local_config = Path(".ergolab.toml")
    if local_config.exists():
        return local_config

    config_dir = Path.home() / ".config" / "ergolab"
    return config_dir / "config.toml"


def load_settings() -> AppSettings:
    """Load settings from file, then .env and the environment (env wins)."""
    load_dotenv()
    settings = AppSettings.load_from_file(get_config_path())
    return settings.apply_env()
