from .NumericalError import NumericalError

class IllConditionedError(NumericalError):
    """
    Raised when a symmetric system that should be positive definite cannot be solved.
    This happens with a zero regularizer and a rank-deficient (weighted) Gram matrix.

    Args:
        message (str): A custom error message (optional).
    """
    def __init__(self, message="Singular or ill-conditioned system. Use a strictly positive regularizer (gamma > 0)."):
        super().__init__(message)
