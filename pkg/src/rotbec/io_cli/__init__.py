"""Configuration, deterministic outputs and the command-line interface."""

from .commands import COMMANDS, EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, EXIT_PARTIAL
from .config import ConfigError, RunConfig, expand_values, load_config, resolve
from .main import build_parser, main, run
from .output import RunManifest, csv_bytes, format_value, pgm_bytes

__all__ = [
    "COMMANDS", "EXIT_OK", "EXIT_CONFIG", "EXIT_NUMERIC", "EXIT_PARTIAL", "ConfigError",
    "RunConfig", "expand_values", "load_config", "resolve", "build_parser", "main", "run",
    "RunManifest", "csv_bytes", "format_value", "pgm_bytes",
]
