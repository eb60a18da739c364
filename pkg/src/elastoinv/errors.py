"""Exception types shared across the package."""


class ElastoInvError(Exception):
    """Base class for all package errors."""


class ParameterError(ElastoInvError, ValueError):
    """A physical parameter violates its admissibility constraint."""


class DomainError(ElastoInvError, ValueError):
    """An argument lies outside the domain of an operation."""


class SingularityError(DomainError):
    """Evaluation requested at a kernel singularity."""


class ConfigurationError(ElastoInvError, ValueError):
    """Inconsistent discretisation or experiment configuration."""


class IllConditionedModeError(ElastoInvError, ArithmeticError):
    """A modal matrix is numerically singular."""

    def __init__(self, n, det):
        super().__init__(f"modal matrix A_n is singular for n={n} (|det|={abs(det):.3e})")
        self.n = n
        self.det = det
