# --- errors.py ---
"""
Exception hierarchy shared by every emoclass module.

Each class carries the CLI exit code it maps to, so `cli.main` can catch
`EmoClassError` once and return `err.exit_code`.
"""

from constants import EXIT_CONFIG_ERROR, EXIT_DATA_ERROR, EXIT_MISSING_EMBEDDINGS


class EmoClassError(Exception):
    """Base class for all errors raised by emoclass."""

    exit_code = EXIT_DATA_ERROR


# --- Configuration (exit 2) ---
class ConfigError(EmoClassError):
    exit_code = EXIT_CONFIG_ERROR


class MissingPath(ConfigError):
    """A file named in the run configuration does not exist."""

    def __init__(self, path, role: str = "file"):
        self.path = str(path)
        self.role = role
        super().__init__(f"{role} not found: {self.path}")


# --- Data (exit 3) ---
class DataError(EmoClassError):
    exit_code = EXIT_DATA_ERROR


class IoError(DataError):
    """Reading or writing a file failed."""


class ParseError(DataError):
    def __init__(self, row: int, column: str, message: str = ""):
        self.row = row
        self.column = column
        detail = f": {message}" if message else ""
        super().__init__(f"parse error at row {row}, column '{column}'{detail}")


class SchemaMismatch(DataError):
    pass


class MissingTextColumn(DataError):
    pass


class TooFewEmotionColumns(DataError):
    pass


class UnknownColumn(DataError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"unrecognized column: '{column}'")


class EmptyText(DataError):
    pass


class DimMismatch(DataError):
    pass


class DuplicateKey(DataError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"duplicate key: '{key}'")


class ZeroVector(DataError):
    pass


class TooFewRows(DataError):
    pass


class NetworkError(DataError):
    pass


class RemoteError(DataError):
    def __init__(self, status: int, message: str):
        self.status = status
        self.message = message
        super().__init__(f"remote embedder returned {status}: {message}")


class EmptySplit(DataError):
    pass


class SingleClass(DataError):
    pass


class EmptyTraining(DataError):
    pass


class ShapeMismatch(DataError):
    pass


class MissingLanguage(DataError):
    def __init__(self, language: str):
        self.language = language
        super().__init__(f"language '{language}' missing from reference table")


class FingerprintMismatch(DataError):
    def __init__(self, expected: str, actual: str):
        self.expected = expected
        self.actual = actual
        super().__init__(f"embedder fingerprint '{actual}' does not match model's '{expected}'")


# --- Missing embeddings (exit 4) ---
class MissingEmbedding(EmoClassError):
    exit_code = EXIT_MISSING_EMBEDDINGS

    def __init__(self, key: str):
        self.key = key
        super().__init__(f"no embedding for sample key '{key}'")
