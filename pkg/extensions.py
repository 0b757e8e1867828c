# extensions.py
import logging
import os

from rich.console import Console
from rich.logging import RichHandler

# Reports go to stdout; everything human-facing goes to stderr.
console = Console(stderr=True)

LOG_LEVEL = os.getenv("CH_LOG_LEVEL", "WARNING").upper()


def configure_logging(level: str | None = None):
    """Attach a single RichHandler to the root logger (idempotent)."""
    root = logging.getLogger()
    if not any(isinstance(h, RichHandler) for h in root.handlers):
        root.addHandler(RichHandler(console=console, show_path=False, rich_tracebacks=True))
    root.setLevel((level or LOG_LEVEL).upper())
    return root
