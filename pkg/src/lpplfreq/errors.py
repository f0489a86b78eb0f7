class DataError(ValueError):
    """Malformed or out-of-contract input data."""


class DegenerateInputError(ArithmeticError):
    """Input is well-formed but the computation has no meaningful answer (e.g. 0/0)."""
