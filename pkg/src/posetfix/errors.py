"""Exception types shared across the package."""


class UsageError(ValueError):
    """Caller supplied arguments that violate an operation's preconditions."""


class ParseError(UsageError):
    """A problem file or expression could not be parsed.

    ``where`` locates the problem, e.g. ``"line 3, column 7"`` or a key path
    like ``"$.space.lo"``.
    """

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


class EvaluationError(RuntimeError):
    """A user mapping raised or returned a value outside the carrier."""


class RangeInclusionError(RuntimeError):
    """An F-value has no preimage under g, so the recurrence cannot advance."""

    def __init__(self, coordinate, value, detail=""):
        self.coordinate = coordinate
        self.value = value
        msg = f"coordinate {coordinate}: value {value!r} is not in the image of g"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
