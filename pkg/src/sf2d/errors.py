"""Exception types raised by sf2d."""


class ParameterError(ValueError):
    """An argument is outside its allowed domain."""


class LagRangeError(ParameterError):
    """A lag (or maximum lag) does not fit inside the field."""


class NoEstimateError(RuntimeError):
    """A feature cannot be estimated because the input carries no usable data."""
