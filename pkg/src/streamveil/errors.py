"""Exception hierarchy shared by every stage of the pipeline."""


class StreamVeilError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(StreamVeilError, ValueError):
    """Input violates a type or configuration invariant."""


class ParseError(StreamVeilError):
    """Malformed dataset file. Carries the 1-based line number when known."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class PipelineError(StreamVeilError):
    """Wraps a module error with the pipeline stage it happened in."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")
