"""Exception types shared across the package."""


class KbError(Exception):
    """Base class for all package errors."""


class ParseError(KbError):
    """A malformed N-Triples line.

    Carries the byte offset of the failure within the line and a short
    category such as ``missing dot`` or ``bad escape``.
    """

    def __init__(self, category: str, byte_offset: int, detail: str = ""):
        self.category = category
        self.byte_offset = byte_offset
        message = f"{category} at byte {byte_offset}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class SchemaError(KbError):
    """Schema triples do not form a valid single-rooted class tree."""


class UnknownEntityError(KbError):
    """Lookup of a class, property, or instance missing from the KB."""


class ConfigError(KbError, ValueError):
    """Invalid configuration or generator specification."""


class ConsistencyError(KbError):
    """Evaluation inputs disagree with the knowledge base contents."""
