"""Exception hierarchy shared across the package."""


class DlsynthError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(DlsynthError):
    pass


class UnknownTypeName(SchemaError):
    pass


class CyclicSchema(SchemaError):
    pass


class DuplicateAttribute(SchemaError):
    pass


class SchemaMismatch(DlsynthError):
    """An instance does not conform to its schema."""


class DanglingIdentifier(DlsynthError):
    """A nested fact's parent identifier matches no parent record."""


class UnknownAttribute(DlsynthError):
    pass


class ArityMismatch(DlsynthError):
    pass


class UnboundHeadVariable(DlsynthError):
    pass


class NonInjectiveSubstitution(DlsynthError):
    pass


class ParseError(DlsynthError):
    pass


class UnmappableTargetAttribute(DlsynthError):
    """No source attribute's value set covers the given target attribute."""

    def __init__(self, attr, message=None):
        self.attr = attr
        super().__init__(message or f"no source attribute maps to {attr}")


class EqualOutputs(DlsynthError):
    """Conflict analysis was invoked on identical outputs."""


class SynthesisFailure(DlsynthError):
    """The search space contains no program consistent with the examples."""


class SynthesisTimeout(DlsynthError):
    pass


class IterationBudgetExceeded(DlsynthError):
    pass


class BudgetExceeded(DlsynthError):
    pass


class OracleRejected(DlsynthError):
    """An interactive answer does not conform to the target schema."""
