"""Exception types raised by the library."""


class DomainError(ValueError):
    """An input lies outside the domain of a physical formula."""


class ContractError(ValueError):
    """A schedule or data structure violates its declared invariants."""


class NumericalError(RuntimeError):
    """A numerical routine (quadrature, root bracketing) failed to converge."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics
