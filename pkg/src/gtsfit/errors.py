"""Exception hierarchy shared across the package.

Every failure mode maps to one of four classes so the CLI can translate
exceptions into stable exit codes: bad input or parameters (2),
optimizer non-convergence (3), numerical breakdown (4).
"""


class GtsError(Exception):
    """Base class for all package errors."""


class DomainError(GtsError, ValueError):
    """Argument or parameter outside its mathematical domain."""


class PoleError(DomainError):
    """Special function evaluated at a pole."""


class DataError(GtsError, ValueError):
    """Input data unusable: parse failures, too few points, degenerate."""


class GridError(GtsError):
    """Evaluation grid unsuitable: tail truncation, coverage, range."""


class LikelihoodError(GtsError):
    """Log-likelihood not finite: some density value ≤ 0 at a data point."""


class ConvergenceError(GtsError):
    """Optimizer could not proceed. Carries the trace built so far."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
