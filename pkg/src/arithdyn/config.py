"""
Runtime settings and logging setup.

Settings are filled from the global CLI flags; ``Settings.from_env`` lets
scripted runs pin them through ``ARITHDYN_*`` environment variables.
"""
import logging
import os
from dataclasses import dataclass, fields, replace

from rich.console import Console
from rich.logging import RichHandler

from .errors import SpecParseError

DEFAULT_PRECISION = 50
DEFAULT_PRINT_DIGITS = 12
DEFAULT_SEARCH_BOUND = 10_000
OUTPUT_FORMATS = ("plain", "json", "csv")
SCHEMA_VERSION = "1"

LOGGER_NAME = "arithdyn"

# Environment variable -> Settings field
ENV_VARS = {
    "ARITHDYN_PRECISION": "precision",
    "ARITHDYN_SEED": "seed",
    "ARITHDYN_OUTPUT": "output",
}


@dataclass(frozen=True)
class Settings:
    """Global knobs shared by every subcommand."""

    precision: int = DEFAULT_PRECISION
    print_digits: int = DEFAULT_PRINT_DIGITS
    seed: int = 0
    output: str = "plain"
    max_depth: int = 64
    search_bound: int = DEFAULT_SEARCH_BOUND
    verbose: bool = False

    def __post_init__(self):
        if self.output not in OUTPUT_FORMATS:
            raise SpecParseError(
                f"Unknown output format '{self.output}'. "
                f"Use one of: {', '.join(OUTPUT_FORMATS)}"
            )
        if self.precision < 15:
            raise SpecParseError(
                f"Precision must be at least 15 digits, got {self.precision}"
            )

    @classmethod
    def from_env(cls, **overrides) -> "Settings":
        """
        Build settings from ``ARITHDYN_*`` variables, then apply overrides.

        Overrides whose value is None are ignored so CLI options left at
        their default do not mask the environment.
        """
        values = {}
        types = {f.name: f.type for f in fields(cls)}
        for var, name in ENV_VARS.items():
            raw = os.environ.get(var)
            if raw is None:
                continue
            values[name] = int(raw) if types[name] in (int, "int") else raw
        settings = cls(**values)
        return replace(settings, **{k: v for k, v in overrides.items() if v is not None})


def configure_logging(verbose: bool = False) -> logging.Logger:
    """
    Attach a rich handler writing to stderr to the package logger.

    Calling it again only adjusts the level.
    """
    logger = logging.getLogger(LOGGER_NAME)
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        handler = RichHandler(
            console=Console(stderr=True),
            show_path=False,
            show_time=False,
        )
        handler.setFormatter(logging.Formatter("%(message)s"))
        logger.addHandler(handler)
        logger.propagate = False
    logger.setLevel(logging.DEBUG if verbose else logging.WARNING)
    return logger
