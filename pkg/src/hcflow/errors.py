class HCFlowError(Exception):
    """Base class for all package errors."""


class SchemaError(HCFlowError, ValueError):
    pass


class RealityError(HCFlowError, ValueError):
    pass


class AlgebraError(HCFlowError, ValueError):
    """Jacobi, Nijenhuis or class-membership failure of a bracket."""

    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


class DimensionError(HCFlowError, ValueError):
    pass


class NumericalError(HCFlowError, ArithmeticError):
    """Ill-conditioned input, step-size underflow or degenerate metric."""
