import logging as log

class ShapeError(ValueError):
    """
    Raised when matrix dimensions do not agree (column count, row count or block width).

    Args:
        message (str): A custom error message (optional).
    """
    def __init__(self, message="Dimension mismatch"):
        super().__init__(message)
        log.debug(message)
