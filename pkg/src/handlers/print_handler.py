import typer
from rich.console import Console

console = Console(stderr=True)


def print_progress(progress: int, msg: str, max: int = 4):
    """
    Prints a progress bar with associated message to stderr, keeping stdout parseable.

    Args:
        progress (int): The progress to display (X out of max).
        msg (str): The associated message to display.
        max (int): The number of total steps (represents 100%)

    Usage:
        print_progress(1,"This is 25% or 1/4",4)
    """
    bar = progress*"▰"+(max-progress)*"▱"
    console.print(f"{bar} {msg}", highlight=False)


def human_readable_duration(milliseconds: float) -> str:
    """
    Converts a duration in milliseconds to a string in the appropriate unit (ms, s, min or h).
    """
    units = [("ms", 1000), ("s", 60), ("min", 60), ("h", None)]

    value = milliseconds
    for unit, factor in units:
        if factor is None or value < factor:
            break
        value /= factor

    return f"{value:.2f} {unit}"


def format_value(value) -> str:
    """Floats with repr precision, everything else as str."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def echo_pairs(pairs: dict):
    """Prints key=value lines to stdout."""
    for key, value in pairs.items():
        typer.echo(f"{key}={format_value(value)}")
