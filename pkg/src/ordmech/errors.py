"""Shared exception types."""


class OrdmechError(Exception):
    """Base class for all library errors."""


class DomainError(OrdmechError, ValueError):
    """Input violates a documented precondition (bad outcome, size mismatch...)."""


class ResourceError(OrdmechError):
    """An exact/exhaustive computation was requested beyond its desk-scale cap."""


class StructuralError(OrdmechError):
    """A structural assumption failed (non-integral vertex, broken matroid axiom...)."""


class InfeasibleError(OrdmechError):
    """Linear program has no feasible point."""


class UnboundedError(OrdmechError):
    """Linear program objective is unbounded."""
