class LieExpError(Exception):
    """Base class for errors raised by liexp."""


class NotInAlgebra(LieExpError, ValueError):
    """A matrix violates the defining constraint of the requested algebra."""


class UnsupportedOrder(LieExpError, ValueError):
    pass


class UnsupportedBasis(LieExpError, ValueError):
    pass


class NotNearIdentity(LieExpError, ValueError):
    """Matrix too far from the identity for the principal logarithm routine."""


class StepRejected(LieExpError, RuntimeError):
    """The ODE right-hand side left the declared Lie algebra."""
