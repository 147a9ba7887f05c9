"""Exception hierarchy shared by all modules."""


class RieszMellinError(Exception):
    """Base class for every error raised by the package."""


class GeometryError(RieszMellinError, ValueError):
    pass


class CoverError(RieszMellinError, ValueError):
    pass


class DomainError(RieszMellinError, ValueError):
    pass


class StripError(RieszMellinError, ValueError):
    """A Mellin line lies outside the strip where the transform is defined."""


class ResolutionError(RieszMellinError, ValueError):
    pass


class SupportError(RieszMellinError, ValueError):
    pass


class PoleProximityError(RieszMellinError, ValueError):
    """Evaluation point too close to a pole of the symbol."""

    def __init__(self, message, pole):
        super().__init__(message)
        self.pole = pole


class WindowError(RieszMellinError, ValueError):
    pass


class ContourError(RieszMellinError, ValueError):
    pass


class HardyWeightError(RieszMellinError, ValueError):
    """The weight 1/x is not integrable against the given function."""


class GridError(RieszMellinError, ValueError):
    pass


class AssemblyError(RieszMellinError, RuntimeError):
    pass


class ConfigError(RieszMellinError, ValueError):
    pass


class LadderError(RieszMellinError, RuntimeError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial or []
