"""Exception types shared across the package."""


class SubdiffError(Exception):
    """Base class for all package errors."""


class DomainError(SubdiffError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InvalidArgumentError(SubdiffError, ValueError):
    """A configuration or constructor argument violates a precondition."""


class ConvergenceFailure(SubdiffError, RuntimeError):
    """An iterative evaluation hit its term cap before reaching tolerance."""


class MeshConstructionError(SubdiffError, RuntimeError):
    """A constructed mesh failed a structural sanity check."""


class ProviderMismatchError(SubdiffError, RuntimeError):
    """An analytic provider disagrees with the defining formula."""


class SolverError(SubdiffError, RuntimeError):
    """A linear solve or time step failed."""
