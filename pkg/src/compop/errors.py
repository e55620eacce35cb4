"""Exception hierarchy shared by all modules."""


class CompopError(Exception):
    """Base class for every error raised by the package."""


class InvalidInputError(CompopError, ValueError):
    pass


class InvalidWeightError(InvalidInputError):
    pass


class InvalidRegionError(InvalidInputError):
    pass


class DomainError(CompopError, ValueError):
    """An argument lies outside the open unit disk (or outside [0, 1))."""


class NotASelfMapError(InvalidInputError):
    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class IntegrationDomainError(CompopError, ArithmeticError):
    """The integrand returned a non-finite value at a quadrature node."""


class ToleranceNotMetError(CompopError, ArithmeticError):
    """Successive refinement levels did not agree to the requested tolerance."""

    def __init__(self, message, estimates):
        super().__init__(message)
        self.estimates = tuple(estimates)


class RootFinderError(CompopError, ArithmeticError):
    def __init__(self, message, iterates=None):
        super().__init__(message)
        self.iterates = iterates


class TruncationBudgetError(CompopError, ArithmeticError):
    def __init__(self, message, required_degree):
        super().__init__(message)
        self.required_degree = required_degree
