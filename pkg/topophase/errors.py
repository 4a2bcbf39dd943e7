"""
Exception hierarchy for the topophase engine and the exit codes the CLI maps them to.
"""
from typing import List, Optional


EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_USAGE = 4


class TopophaseError(Exception):
    """Base class for every error raised by the engine"""


class DomainError(TopophaseError, ValueError):
    """An input lies outside the domain of the operation"""


class SizeGuardError(DomainError):
    """Exhaustive enumeration refused: too many candidates"""


class ConfigError(TopophaseError):
    """The configuration document is malformed or fails validation"""

    def __init__(self, message: str, issues: Optional[List] = None):
        super().__init__(message)
        self.issues = list(issues or [])


class ParseError(ConfigError):
    """The configuration text is not valid JSON"""


class InfeasibleError(TopophaseError):
    """No facility set satisfies the allocation constraints"""

    def __init__(self, message: str, constraint: str = "", t: Optional[float] = None):
        super().__init__(message)
        self.constraint = constraint
        self.t = t

    def __reduce__(self):
        return (InfeasibleError, (str(self), self.constraint, self.t))

    def at(self, t: float) -> "InfeasibleError":
        """Return a copy annotated with the sweep parameter it was raised at"""
        return InfeasibleError(f"{self} (at t={t:.6f})", constraint=self.constraint, t=t)


def exit_code_for(error: BaseException) -> int:
    if isinstance(error, ConfigError):
        return EXIT_CONFIG
    if isinstance(error, InfeasibleError):
        return EXIT_INFEASIBLE
    return EXIT_USAGE
