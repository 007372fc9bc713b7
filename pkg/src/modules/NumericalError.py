import logging as log

class NumericalError(ArithmeticError):
    """
    Base class for numerical failures. The CLI maps these to exit code 2.

    Args:
        message (str): A custom error message (optional).
    """
    def __init__(self, message="Numerical failure"):
        super().__init__(message)
        log.debug(message)
