"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: validation-type errors exit 2,
dependency errors exit 3, I/O problems exit 4.
"""


class CtokitError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(CtokitError):
    """Input violates a documented contract (exit code 2)."""


class ProtocolParseError(ValidationError):
    """Protocol XML is not well formed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class ProtocolSchemaError(ValidationError):
    """Protocol XML is well formed but misses mandatory metadata."""

    def __init__(self, field: str, detail: str = ""):
        self.field = field
        message = f"missing or invalid protocol field: {field}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class RegistryLoadError(ValidationError):
    """Member registry file cannot be loaded."""


class AnnotationValidationError(ValidationError):
    """An annotation record violates a store invariant."""

    def __init__(self, rule: str, detail: str = ""):
        self.rule = rule
        message = rule if not detail else f"{rule}: {detail}"
        super().__init__(message)


class AnnotationFormatError(ValidationError):
    """Annotation log file is malformed or has the wrong version."""

    def __init__(self, message: str, record_index: int | None = None):
        self.record_index = record_index
        if record_index is not None:
            message = f"{message} (record {record_index})"
        super().__init__(message)


class UnknownItemError(CtokitError):
    """Queue item reference does not exist."""


class LexiconError(ValidationError):
    """Topic lexicon file is incomplete or malformed."""


class ExternalServiceError(CtokitError):
    """Base for failures of external classifier/NER endpoints."""

    def __init__(self, message: str, ref: str | None = None):
        self.ref = ref
        if ref is not None:
            message = f"{message} [ref={ref}]"
        super().__init__(message)


class TransportError(ExternalServiceError):
    """Endpoint unreachable or timed out; the item stays unprocessed."""


class ContractError(ExternalServiceError):
    """Endpoint answered outside the documented wire contract."""


class DegenerateTableError(ValidationError):
    """Contingency table has fewer than two labels on one axis."""


class StatsDomainError(ValidationError):
    """Statistic argument outside its mathematical domain."""


class EmptyStatsError(ValidationError):
    """Descriptive statistics requested over an empty record set."""


class ConfigError(ValidationError):
    """Pipeline configuration is missing or invalid."""


class DependencyError(CtokitError):
    """A stage was run before the stage that produces its input (exit code 3)."""

    def __init__(self, missing: str, run_first: str):
        self.missing = missing
        self.run_first = run_first
        super().__init__(f"missing artifact {missing}; run the '{run_first}' stage first")
