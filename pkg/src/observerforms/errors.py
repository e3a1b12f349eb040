"""Exceptions raised by observerforms."""


class ObserverFormsError(ValueError):
    """Base class for every error raised by the package."""


class DivisionByZeroFieldError(ObserverFormsError):
    """Division by the zero rational function."""


class UnknownCoordinateError(ObserverFormsError):
    """A coordinate name that is not part of the chart."""


class PoleAtPointError(ObserverFormsError):
    """A rational function evaluated where its denominator vanishes."""


class ExponentOverflowError(ObserverFormsError):
    """An exponent outside the supported machine-integer range."""


class ChartMismatchError(ObserverFormsError):
    """Operands that live on different charts."""


class DegreeMismatchError(ObserverFormsError):
    """Operands whose form degrees are incompatible."""


class MetricError(ObserverFormsError):
    """A chart without the metric structure an operation needs."""


class NullObserverError(ObserverFormsError):
    """An observer built from a vector field with identically vanishing norm."""


class InvalidObserverError(ObserverFormsError):
    """A pair (T, tau) violating tau(T) = 1."""


class InvalidConnectionError(ObserverFormsError):
    """An endomorphism field violating the connection projection axioms."""


class InconsistentScenarioError(ObserverFormsError):
    """Electromagnetic inputs that contradict each other."""


class MissingPotentialError(ObserverFormsError):
    """An operation that needs the potential one-form when none was given."""


class UnknownSuiteError(ObserverFormsError):
    """An identity suite name that is not registered."""


class _PositionedError(ObserverFormsError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ExpressionSyntaxError(_PositionedError):
    """An expression string that does not match the grammar."""


class UnknownIdentifierError(_PositionedError):
    """An identifier in an expression that is not a chart coordinate."""


class NegativeExponentError(_PositionedError):
    """A `^` operator with a negative exponent."""


class ScenarioInputError(ObserverFormsError):
    """Invalid scenario or connection input, tagged with the offending field path."""

    def __init__(self, message: str, path: str = "") -> None:
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
