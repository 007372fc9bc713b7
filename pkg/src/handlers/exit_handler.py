import logging as log
import typer

from modules.NumericalError import NumericalError

# Exit codes
SUCCESS = 0
USAGE = 1
NUMERICAL = 2


def exit_code_for(error: Exception) -> int:
    """Numerical failures exit with 2, bad input and I/O problems with 1."""
    return NUMERICAL if isinstance(error, NumericalError) else USAGE


class ExitHandler(Exception):
    """
    Raised to end the program with the given exit code.
    """
    def __init__(self, code: int):
        log.debug(f"Exiting with code {code}")
        raise typer.Exit(code)
