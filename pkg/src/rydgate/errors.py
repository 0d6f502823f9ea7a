"""Exception types raised across the package."""


class RydgateError(Exception):
    """Base class for runtime failures (CLI exit code 3)."""


class ConfigError(RydgateError, ValueError):
    """Invalid or incomplete configuration (CLI exit code 2).

    ``key`` names the offending dotted config key when one is known.
    """

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


class StepTooCoarseError(RydgateError):
    pass


class ConvergenceError(RydgateError):
    pass


class FitError(RydgateError):
    pass
