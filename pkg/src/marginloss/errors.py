"""Exception hierarchy shared by every module."""


class MarginLossError(Exception):
    """Base class for all errors raised by :mod:`marginloss`."""


class DomainError(MarginLossError, ValueError):
    """An argument lies outside the support or domain of a function."""


class ParameterError(MarginLossError, ValueError):
    """An invalid constructor or configuration parameter."""


class LabelError(MarginLossError, ValueError):
    """A class label outside {-1, +1}."""


class UnsupportedError(MarginLossError, NotImplementedError):
    """The requested operation needs information the object does not carry."""


class QuadratureError(MarginLossError, ArithmeticError):
    """Adaptive quadrature failed to reach its tolerance."""


class DegenerateMarginError(MarginLossError, ArithmeticError):
    """A ratio of margins is undefined because the denominator is zero."""


class EmptyDatasetError(MarginLossError, ValueError):
    """A dataset with no rows was supplied."""


class DegenerateStageError(MarginLossError, ArithmeticError):
    """A boosting stage found no stump with weighted error below one half."""
