"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside its documented domain."""


class ValidationError(ValueError):
    """A data structure violates its invariants."""


class ConfigError(ValueError):
    """An experiment configuration was rejected."""


class BracketingError(RuntimeError):
    """A threshold search could not bracket its target probability."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
