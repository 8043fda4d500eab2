"""
Exception hierarchy for conelab.

Numeric kernels raise these; the CLI maps the configuration family to exit code 2.
"""

from typing import Optional


class ConelabError(Exception):
    """Base class for all library errors."""


class AlgebraSpecError(ConelabError, ValueError):
    """Unparseable or unsupported algebra specification string."""


class AlgebraMismatchError(ConelabError, ValueError):
    """Operands belong to different algebras."""


class DomainError(ConelabError, ValueError):
    """A spectral function was applied outside its domain."""

    def __init__(self, function: str, eigenvalue: float, threshold: float):
        self.function = function
        self.eigenvalue = eigenvalue
        self.threshold = threshold
        super().__init__(
            f"{function} undefined: eigenvalue {eigenvalue:.6g} <= threshold {threshold:.3g}"
        )


class SingularElementError(ConelabError, ValueError):
    """Element (or g(1)) is not invertible."""


class ConvergenceError(ConelabError, RuntimeError):
    """Iterative solver did not converge."""


class StructureResidualError(ConelabError, ValueError):
    """Operator is too far from the structure algebra."""

    def __init__(self, residual: float, tolerance: float, what: str = "str"):
        self.residual = residual
        self.tolerance = tolerance
        super().__init__(f"{what} residual {residual:.3e} exceeds tolerance {tolerance:.1e}")


class NotADerivationError(StructureResidualError):
    """Operator is not a derivation."""

    def __init__(self, residual: float, tolerance: float):
        super().__init__(residual, tolerance, what="derivation")


class LiftDivergenceError(ConelabError, RuntimeError):
    """Automorphism drift during a lift integration exceeded the abort tolerance."""

    def __init__(self, time: float, residual: float, tolerance: Optional[float] = None):
        self.time = time
        self.residual = residual
        super().__init__(
            f"lift diverged at t={time:.6f}: automorphism residual {residual:.3e}"
            + (f" > {tolerance:.1e}" if tolerance is not None else "")
        )


class HypothesisViolationError(ConelabError, ValueError):
    """Input violates the hypothesis of a minimality statement."""
