"""Exception types raised across the package."""


class GroverSuppressError(Exception):
    """Base class for all package errors."""


class InvalidSizeError(GroverSuppressError, ValueError):
    pass


class InvalidGateError(GroverSuppressError, ValueError):
    pass


class ShapeError(GroverSuppressError, ValueError):
    pass


class InvalidSpecError(GroverSuppressError, ValueError):
    pass


class InvalidArgumentError(GroverSuppressError, ValueError):
    pass


class InvalidInstanceError(GroverSuppressError, ValueError):
    pass
