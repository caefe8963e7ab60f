"""Exception hierarchy shared by every rankfarm module.

Each exception carries a stable ``code`` (its class name) used for CLI
diagnostics (``ERROR <code>: ...``) and HTTP error bodies.
"""


class RankfarmError(Exception):
    """Base class for all rankfarm errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


class ValidationError(RankfarmError):
    """Input failed validation (CLI exit code 2, HTTP 400)."""


class ParseError(ValidationError):
    pass


class SchemaError(ValidationError):
    pass


class WeightError(ValidationError):
    pass


class UnknownAttribute(ValidationError):
    pass


class NonPositiveValue(ValidationError):
    pass


class DuplicateService(ValidationError):
    pass


class EmptyCatalog(ValidationError):
    pass


class IoError(RankfarmError):
    """Filesystem or configuration failure (CLI exit code 4)."""


class RankingError(RankfarmError):
    """Failure inside the ranking pipeline."""


class EmptyMatch(RankingError):
    pass


class MissingQoSValue(RankingError):
    def __init__(self, service_id: str, attribute: str):
        super().__init__(f"service {service_id!r} has no value for attribute {attribute!r}")
        self.service_id = service_id
        self.attribute = attribute


class MissingVReq(RankingError):
    pass


class NoConvergence(RankingError):
    pass


class DimensionMismatch(RankingError):
    pass


class UnsupportedFormat(RankfarmError):
    pass
