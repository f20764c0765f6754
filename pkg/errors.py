"""
Exception types shared by the sequence, field and identity modules.
"""


class DegenerateDenominatorError(ValueError):
    """The partial-sum closed form divides by zero (a characteristic root equals 1)."""


class InternalInconsistencyError(ArithmeticError):
    """An exact computation produced a value that valid inputs can never produce.

    Raised when a Binet evaluation keeps an irrational part, a generating
    function coefficient is not integral, or a closed-form division leaves a
    remainder. It signals an arithmetic bug, never bad input.
    """
