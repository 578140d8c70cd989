"""
Error hierarchy - every failure the library can signal, with its CLI exit code
"""

c_EXIT_OK = 0
c_EXIT_UNEXPECTED = 1
c_EXIT_VALIDATION = 2
c_EXIT_EXHAUSTED = 3
c_EXIT_MISMATCH = 4


class ChateletError(Exception):
    """Base class for all library errors"""

    exit_code = c_EXIT_VALIDATION


class ZeroArgument(ChateletError):
    """Raised when an operation needs a nonzero argument"""


class NotPrime(ChateletError):
    """Raised when an argument expected to be prime is not"""


class NotOddPrime(NotPrime):
    """Raised when an odd prime was required"""


class NotCoprime(ChateletError):
    """Raised when a residue shares a factor with its modulus"""


class Inconsistent(ChateletError):
    """Raised when a congruence system has no solution"""


class Exhausted(ChateletError):
    """Raised when a search bound is reached before a solution is found"""

    exit_code = c_EXIT_EXHAUSTED


class SolverExhausted(Exhausted):
    """Raised by the parameter builders when a constraint scan gives up"""


class SplitCheckFailed(ChateletError):
    """Raised when a place is required to split completely and does not"""


class SquareA(ChateletError):
    """Raised when the parameter a is a rational square"""


class NoLocalPointOnFiber(ChateletError):
    """Raised when a fiber has no local point at the requested place"""


class NotLocallySolvable(ChateletError):
    """Raised when no local point could be found at a place"""


class ConstancyNotProven(ChateletError):
    """Raised when a verdict is requested for a certificate that does not pass"""


class ParseError(ChateletError):
    """Raised when a certificate document or CLI value cannot be parsed"""

    exit_code = c_EXIT_MISMATCH


class RuleHypothesisFailed(ChateletError):
    """Raised when a case of the constancy proof has a failing hypothesis"""

    def __init__(self, case_id: str, condition: str):
        super().__init__(f"{case_id}: {condition}")
        self.case_id = case_id
        self.condition = condition


class InvalidField(ChateletError):
    """Raised when a polynomial does not define a number field"""
