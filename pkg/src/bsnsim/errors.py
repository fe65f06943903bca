"""Shared exception types."""


class ParameterError(ValueError):
    """An argument violates an operation's precondition."""


class FrameError(ValueError):
    """A sensor frame buffer is malformed (short buffer, bad CRC, field overflow)."""


class ScenarioError(ValueError):
    """A scenario file failed to parse or validate.

    Carries the offending line number when the error is tied to a
    specific line of the scenario file.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UndefinedBatteryLifeError(ValueError):
    """Battery life is undefined because the average current is zero."""
