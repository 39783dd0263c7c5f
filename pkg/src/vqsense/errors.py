class ParameterError(ValueError):
    """Invalid argument shape, range, or value."""


class NumericalError(ArithmeticError):
    """A loss, gradient, or estimate came out non-finite."""


class EpisodeAborted(NumericalError):
    """Too many consecutive numerically failed steps in one episode."""
