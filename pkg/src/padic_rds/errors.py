"""
Exception hierarchy for padic-rds.

Every error raised deliberately by the library derives from PadicRdsError so
callers (and the CLI exit-code mapping) can catch the whole family at once.
"""
from typing import Iterable, List, Optional


class PadicRdsError(Exception):
    """Base class for all padic-rds errors."""
    pass


class InvalidModulus(PadicRdsError):
    """Raised when the modulus p is not a prime."""
    pass


class InvalidPrecision(PadicRdsError):
    """Raised when the precision K is smaller than one digit."""
    pass


class IncompatibleOperands(PadicRdsError):
    """Raised when two p-adic integers with different (p, K) meet in one operation."""
    pass


class PrecisionExceeded(PadicRdsError):
    """Raised when a requested identity cannot be observed at the working precision."""
    pass


class NotAUnit(PadicRdsError):
    """Raised when a residue divisible by p is given where a unit is required."""
    pass


class NotOnSphere(PadicRdsError):
    """Raised when a p-adic integer with positive valuation is given where |x|_p = 1 is required."""
    pass


class NotAUnitModQ(PadicRdsError):
    """Raised when an exponent shares a factor with the attractor order q."""
    pass


class NotInvariant(PadicRdsError):
    """Raised when a target set is not mapped onto itself by every exponent."""
    pass


class InternalInconsistency(PadicRdsError):
    """Raised when two independent computations of the same quantity disagree."""
    pass


class ModelViolation(PadicRdsError):
    """Raised when simulated data contradicts the deterministic attractor structure."""
    pass


class SizeLimitExceeded(PadicRdsError):
    """Raised when an exact computation is requested for a state space beyond the supported size."""
    pass


class ConfigurationError(PadicRdsError):
    """Exception raised when configuration is malformed.

    Args:
        violations: every problem found, not just the first one
        source: optional file the configuration came from
    """

    def __init__(self, violations: Iterable[str], source: Optional[str] = None):
        self.violations: List[str] = list(violations)
        self.source = source
        super().__init__(self._render())

    def _render(self) -> str:
        details = "\n".join(f"  - {v}" for v in self.violations)
        if self.source is None:
            return "Invalid experiment configuration:\n" + details
        return "Configuration is malformed. Unable to proceed.\n\n" \
               "-------------------------------------------------------\n" \
               "          Configuration file malformed - cannot continue\n" \
               "-------------------------------------------------------\n" \
               f"File: {self.source}\n" \
               f"Error details:\n{details}\n" \
               "-------------------------------------------------------"
