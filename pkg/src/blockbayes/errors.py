"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A scalar or vector parameter is outside its admissible domain."""


class DegenerateSignalError(ValueError):
    """The generated signal carries no energy, so an SNR cannot be realized."""


class DegenerateMetricError(ValueError):
    """A metric is undefined for the given inputs (e.g. zero ground truth)."""
