"""Exception hierarchy shared across the package."""


class MisinfoGameError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class ShapeError(MisinfoGameError, ValueError):
    pass


class UndefinedMetricError(MisinfoGameError, ArithmeticError):
    """PoA/PoM requested with an empty equilibrium set or a non-positive denominator."""


class DegenerateGameError(MisinfoGameError):
    """A game has a positive-dimensional set of equilibrium strategies."""

    def __init__(self, message, game=None):
        super().__init__(message)
        self.game = game


class NonCanonicalError(MisinfoGameError):
    pass


class InflationError(MisinfoGameError, ValueError):
    pass


class CapExceededError(MisinfoGameError):
    """A resource cap was hit; ``partial`` carries whatever was computed so far."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class SchemaError(ValueError):
    """Malformed input document (CLI exit code 2)."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
