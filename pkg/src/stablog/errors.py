"""Exception types raised by the engine, parser and CLI."""


class StablogError(Exception):
    """Base class for every error this package raises deliberately."""


class ParseError(StablogError):
    """Malformed surface syntax. Carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownPredicateError(StablogError):
    """A goal refers to a predicate name/arity that was never defined."""


class DuplicateDefinitionError(StablogError):
    """A predicate name/arity was defined twice on one engine."""


class NonGroundNegationError(StablogError):
    """noto reached with unbound arguments (floundering)."""


class VerifierError(StablogError):
    """Base for verifier expression evaluation failures."""


class VerifierTypeError(VerifierError):
    """Verifier operator applied to operands of the wrong type."""


class VerifierZeroDivisionError(VerifierError):
    """Division or modulo by zero inside a verifier expression."""


class UnboundVerifierVariableError(VerifierError):
    """A verifier variable is not bound by any emitter pattern."""


class UnknownExternalError(StablogError):
    """A verifier expression calls an external function never registered."""


class DuplicateExternalError(StablogError):
    """An external function name was registered twice."""


class ExternalArityError(StablogError):
    """An external function call does not match its declared arity."""


class DeferredGroundingError(StablogError):
    """A negative emitter variable cannot be grounded at answer time."""


class NonDualPairError(StablogError):
    """Model enumeration found a candidate where a declared dual pair is
    both true or neither true."""


class StepLimitExceeded(StablogError):
    """The engine exceeded the configured search-step limit."""

    def __init__(self, limit: int):
        super().__init__(f"search aborted after exceeding {limit} steps")
        self.limit = limit
