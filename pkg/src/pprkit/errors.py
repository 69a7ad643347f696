"""Exception hierarchy shared across the package."""


class PPRError(Exception):
    """Base class for every error raised by pprkit."""


class InvalidVertexError(PPRError, IndexError):
    """A vertex id outside ``[0, n)`` was passed to an oracle."""


class InvalidIndexError(PPRError, IndexError):
    """A neighbor index outside ``[1, d(v)]`` was requested."""


class ModelViolationError(PPRError):
    """A query was issued that the session's access model does not allow."""


class PreconditionError(PPRError, ValueError):
    """Arguments violate an operation's documented precondition."""


class GraphFormatError(PPRError, ValueError):
    """A graph file or edge list is malformed.

    ``line`` holds the 1-based line number of the offending line when the
    error comes from a file.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SwapViolationError(PPRError, ValueError):
    """A quadruple failed the swappability test."""


class ConstructionError(PPRError, ValueError):
    """A graph transformation could not be carried out."""


class GenerationError(PPRError, ValueError):
    """Family parameters violate the family's constraint set."""
