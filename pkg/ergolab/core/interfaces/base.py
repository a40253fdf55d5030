"""Base error hierarchy shared by every ergolab component."""


class ErgolabError(Exception):
    """Root of all ergolab errors."""


class ConfigurationError(ErgolabError):
    """Raised when a system, potential or experiment description is invalid."""


class BudgetExceededError(ErgolabError):
    """Raised when an enumeration would exceed the configured word budget."""
