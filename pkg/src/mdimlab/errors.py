"""Exception and warning types shared across the package."""


class MdimlabError(Exception):
    """Base class for all package errors."""


class ValidationError(MdimlabError, ValueError):
    """A parameter or input violates a documented precondition."""


class StructuralError(MdimlabError, TypeError):
    """A metric node was evaluated on points of the wrong variant."""


class DomainError(ValidationError):
    """A function argument lies outside its domain."""


class BudgetError(MdimlabError):
    """A finite representation cannot carry the requested computation."""


class DepthError(BudgetError):
    """A symbolic truncation is too short for the requested orbit."""


class RepresentabilityError(BudgetError):
    """An interval block cannot be represented in double precision."""


class SizeError(ValidationError):
    """An exact routine was called on an instance above its size cap."""


class MembershipError(ValidationError):
    """A gauge violates the membership conditions required by a routine."""


class PrecisionWarning(UserWarning):
    """A threshold comparison fell within the truncation error bound."""
