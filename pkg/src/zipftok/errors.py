"""Exception types shared across the package.

``DataError`` subclasses signal problems with the *input data* (the CLI
maps them to exit code 3); plain ``ValueError`` is used for invalid
arguments and configuration (exit code 2).
"""


class TokenizerError(Exception):
    """Base class for all package-specific errors."""


class DataError(TokenizerError):
    """The input data is unusable (unreadable, empty, degenerate)."""


class CorpusError(DataError):
    """A corpus file cannot be turned into pre-token counts."""


class EmptyCorpusError(CorpusError):
    """The corpus contains zero pre-tokens."""


class EmptyTableError(DataError):
    """A token frequency table has no entries left after filtering."""


class InsufficientPointsError(DataError):
    """Fewer than three rank-frequency points; a line fit is meaningless."""


class VocabularyFormatError(TokenizerError):
    """A vocabulary file is malformed or internally inconsistent."""


class TrainerStateError(RuntimeError):
    """An incremental trainer update no longer matches its own index."""
