"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument violates an operation's domain requirements."""


class DimensionMismatch(DomainError):
    """Operands have incompatible dimensions."""


class SingularBlock(DomainError):
    """A leading block that must be invertible is singular."""


class NotIndependent(DomainError):
    """A vertex set expected to be independent contains an edge."""


class NotSymmetric(DomainError):
    """A matrix expected to be symmetric is not."""


class NoConvergence(RuntimeError):
    """An iterative eigenvalue computation exceeded its budget."""


class BudgetExceeded(RuntimeError):
    """An exhaustive search exceeded its node budget."""
