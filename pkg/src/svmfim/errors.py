"""Exception hierarchy shared by every module."""


class SvmfimError(Exception):
    pass


class InputError(SvmfimError):
    """Bad or unusable input data. The CLI maps these to exit code 2."""


class ConfigError(SvmfimError, ValueError):
    """Invalid configuration. The CLI maps these to exit code 3."""


class ParseError(InputError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class EmptyDatabaseError(InputError):
    pass


class FormatError(InputError):
    def __init__(self, message, row=None):
        self.row = row
        super().__init__(message if row is None else f"row {row}: {message}")


class DomainError(SvmfimError, ValueError):
    """Argument outside the domain of an operation (bad item id, dimension mismatch)."""


class GuardError(SvmfimError):
    """Refusal to run an exponential oracle on too large an input."""


class TrainingError(InputError):
    pass


class NumericError(SvmfimError, ArithmeticError):
    pass


class UndefinedRuleError(SvmfimError, ValueError):
    pass


class AggregationError(SvmfimError, ValueError):
    pass


class EvaluationError(SvmfimError, ValueError):
    pass
