"""Exception hierarchy shared across the package."""


class TrajforgeError(Exception):
    """Base class for all package errors."""


class ContractViolation(TrajforgeError):
    """An operation was called with arguments that break its contract
    (shape mismatch, incompatible units, bad parameter range)."""


class DataValidationError(TrajforgeError):
    """Input data violates a type invariant (non-finite values,
    non-increasing frames, malformed dataset layout)."""


class ParseError(DataValidationError):
    """A trajectory file line could not be parsed."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


class UnknownHeuristicError(TrajforgeError):
    """Heuristic name not found in the predictor registry."""

    def __init__(self, name, registered):
        self.name = name
        self.registered = list(registered)
        super().__init__(
            f"unknown heuristic {name!r}; registered: {', '.join(self.registered)}"
        )


class RenderError(TrajforgeError):
    """A prompt template placeholder has no binding."""


class CodeExtractionError(TrajforgeError):
    """An LLM reply contained no fenced code block."""


class ProviderError(TrajforgeError):
    """The chat-completion provider failed permanently."""


class SelectionError(TrajforgeError):
    """Parent selection is impossible (fewer than two successful candidates)."""


class SamplingError(TrajforgeError):
    """Elite-archive sampling is impossible (empty archive)."""
