import logging as log

class DataFormatError(ValueError):
    """
    Raised when an input file cannot be parsed into a dataset or a series.

    Args:
        message (str): A custom error message (optional).
        line (int): The 1-based line number where parsing failed (optional).
    """
    def __init__(self, message="Malformed data file", line: int = None):
        self.line = line
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        log.debug(message)
