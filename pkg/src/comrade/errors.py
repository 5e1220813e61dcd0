"""Shared exception types."""


class ConfigurationError(ValueError):
    """Invalid config values (map dimensions, speeds, probabilities...)."""


class DomainError(ValueError):
    """Out-of-bounds points, unknown ids, ordering violations."""


class ActionRejected(RuntimeError):
    """An action failed its legality check; carries the reason."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class InsufficientDataError(ValueError):
    """Not enough recorded player data for the requested operation."""


class TraceParseError(ValueError):
    """Malformed trace/persistence file; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
