"""Exception hierarchy shared by every module of the package."""


class QHIError(Exception):
    """Base class; ``category`` is the diagnostic label the CLI reports."""

    category = "error"


class PoleError(QHIError, ZeroDivisionError):
    category = "regularity"


class OffCurveError(QHIError, ValueError):
    category = "regularity"


class NotRegularError(QHIError, ValueError):
    category = "regularity"

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class BranchCutError(QHIError, ValueError):
    category = "regularity"


class CalibrationError(QHIError, RuntimeError):
    category = "regularity"


class ValidationError(QHIError, ValueError):
    category = "validation"

    def __init__(self, message, diagnostics=()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)


class NotApplicable(QHIError, ValueError):
    category = "validation"


class NotFound(QHIError, LookupError):
    category = "validation"


class BoundExceeded(QHIError, RuntimeError):
    category = "budget"


class BudgetExceeded(QHIError, RuntimeError):
    category = "budget"


class Infeasible(QHIError, ValueError):
    """No integer solution; ``certificate`` names the failing pivot row."""

    category = "validation"

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class TransitFailure(QHIError, RuntimeError):
    category = "transit-failure"

    def __init__(self, message, reason):
        super().__init__(message)
        self.reason = reason


class ExhaustedRetries(QHIError, RuntimeError):
    category = "transit-failure"


class NotACocycle(QHIError, ValueError):
    category = "validation"


class ParseError(QHIError, ValueError):
    category = "validation"

    def __init__(self, message, line=None, column=None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + loc)
        self.line = line
        self.column = column


class UnknownVersion(ParseError):
    pass
