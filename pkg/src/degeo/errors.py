"""Exception types shared across the package."""


class DegeoError(Exception):
    """Base class for all package errors."""


class DomainError(DegeoError, ValueError):
    """Input violates a documented precondition."""


class CatalogError(DegeoError, KeyError):
    """Unknown named graph."""


class NumericalError(DegeoError, RuntimeError):
    """A numerical routine failed beyond recoverable tolerance."""
