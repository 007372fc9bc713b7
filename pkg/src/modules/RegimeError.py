from .NumericalError import NumericalError

class RegimeError(NumericalError):
    """
    Raised when a pseudoinverse-based BLS increment is applied to a model trained with a
    regularizer above the pseudoinverse threshold. Those updates are only exact when the
    regularization factor tends to zero.

    Args:
        lam (float): The model's regularizer.
        threshold (float): The largest regularizer the pseudoinverse updates accept.
    """
    def __init__(self, lam: float, threshold: float):
        self.lam = lam
        self.threshold = threshold
        super().__init__(
            f"BLS incremental updates require the regularization factor to tend to zero "
            f"(lambda={lam:g} > {threshold:g}). Retrain with a smaller lambda, or use the C-BLS "
            f"incremental updates, which accept any gamma."
        )
