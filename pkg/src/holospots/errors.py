"""Exception types shared across the package."""


class HoloError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(HoloError, ValueError):
    """A physical or numerical parameter is outside its valid domain."""


class GeometryMismatchError(HoloError, ValueError):
    """A hologram or image does not belong to the pupil it is used with."""


class OutOfFieldError(HoloError, ValueError):
    """Generated spots fall outside the configured field of view."""


class ZeroIlluminationError(HoloError, ValueError):
    """The pupil carries no illumination, so intensities are undefined."""


class UndefinedUniformityError(HoloError, ValueError):
    """All spot intensities are zero; the uniformity ratio is 0/0."""


class DegenerateFieldError(HoloError, RuntimeError):
    """Every spot field vanished at once; the weight update has no anchor."""
