"""Logging setup shared by the command-line entry points."""

from __future__ import annotations

import logging

from rich.console import Console
from rich.logging import RichHandler

LEVELS = [logging.WARNING, logging.INFO, logging.DEBUG]


def configure_logging(console: Console, verbosity: int = 0) -> None:
    """Route all evoact loggers through rich.

    Args:
        console: Console the handler writes to (stderr console from the CLI)
        verbosity: 0 = warnings, 1 = info, 2+ = debug
    """
    level = LEVELS[min(verbosity, len(LEVELS) - 1)]
    handler = RichHandler(console=console, show_path=verbosity >= 2, rich_tracebacks=True)
    handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))

    root = logging.getLogger("evoact")
    root.handlers.clear()
    root.addHandler(handler)
    root.setLevel(level)
    root.propagate = False
