# app.py
import os

import click
from dotenv import load_dotenv

# --- Core config (before any engine module reads its CH_* defaults) ----------
load_dotenv(os.getenv("CH_ENV_FILE") or None)

from extensions import configure_logging  # noqa: E402


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--log-level", default=None, help="Logger level (default CH_LOG_LEVEL or WARNING).")
def cli(log_level):
    """Numerical verification toolkit for Cartan–Hartogs domains.

    Every command prints a JSON report; exit code 0 iff all gated checks pass,
    1 on a failed check or toolkit error, 2 on usage errors.
    """
    configure_logging(log_level)


# --- Commands (import after config is loaded) ---------------------------------
from views.catalog import catalog  # noqa: E402
from views.geometry import verify_metric, verify_volume_form  # noqa: E402
from views.szego import isometry, logterm_scan, szego  # noqa: E402
from views.tyz import tyz  # noqa: E402

for command in (catalog, verify_metric, verify_volume_form, tyz, szego, logterm_scan, isometry):
    cli.add_command(command)


def run_command(argv) -> int:
    """Run one command in-process and return its exit code."""
    try:
        cli.main(args=list(argv), prog_name="cartan-hartogs", standalone_mode=True)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else (0 if e.code is None else 1)
    return 0


# --- Entrypoint ---------------------------------------------------------------
if __name__ == "__main__":
    cli()
