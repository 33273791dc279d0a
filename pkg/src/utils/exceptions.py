"""
Exceptions
Error hierarchy raised by the services and mapped to exit codes by the CLI
"""

from src.config.constants import EXIT_FAIL, EXIT_INDETERMINATE, EXIT_USAGE


class CMFieldError(Exception):
    """Base class for all domain errors"""

    exit_code = EXIT_FAIL

    def __init__(self, message: str = ""):
        super().__init__(message or self.__class__.__doc__)
        self.message = message or self.__class__.__doc__


# Input validation

class NotImaginary(CMFieldError):
    """Discriminant is not negative"""
    exit_code = EXIT_USAGE


class NotFundamental(CMFieldError):
    """Not a fundamental discriminant"""
    exit_code = EXIT_USAGE


class ZeroIdeal(CMFieldError):
    """Operation requires a nonzero ideal"""
    exit_code = EXIT_USAGE


class NotIntegral(CMFieldError):
    """Operation requires an integral ideal"""
    exit_code = EXIT_USAGE


class NotCoprime(CMFieldError):
    """Ideal or integer is not coprime to the modulus"""
    exit_code = EXIT_USAGE


class NotDivisor(CMFieldError):
    """Target modulus does not divide the group modulus"""
    exit_code = EXIT_USAGE


class OutOfScope(CMFieldError):
    """Input lies outside the range the verifier covers"""
    exit_code = EXIT_USAGE


class LatticePoint(CMFieldError):
    """Argument lies on (or numerically at) a lattice point"""
    exit_code = EXIT_USAGE


# Searches

class SearchExhausted(CMFieldError):
    """Bounded search found no candidate below its hard cap"""


class NoneFound(CMFieldError):
    """No character satisfies the requested predicates"""


class NoTwistExists(CMFieldError):
    """No class group character is nontrivial on the subgroup"""


class AlreadyImpossible(CMFieldError):
    """Subgroup is trivial, so no character can be nontrivial on it"""


class NotCoprimeRepresentative(CMFieldError):
    """Representative ideal shares a prime with the modulus"""


class ConductorUndefined(CMFieldError):
    """Divisors the character factors through have no least element"""


# Numerics

class DegenerateDifference(CMFieldError):
    """Weber values coincide to working precision"""


class PrecisionExhausted(CMFieldError):
    """Precision escalations did not settle the computation"""
    exit_code = EXIT_INDETERMINATE


class Indeterminate(CMFieldError):
    """A distance stayed inside the hysteresis band after all escalations"""
    exit_code = EXIT_INDETERMINATE
