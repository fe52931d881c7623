"""Exception hierarchy.

Each class carries the process exit code the CLI maps it to.
"""


class KernormError(Exception):
    exit_code = 1


class ConfigurationError(KernormError, ValueError):
    exit_code = 2


class InputError(KernormError, ValueError):
    exit_code = 2


class DomainError(KernormError, ValueError):
    exit_code = 4


class IngestionError(KernormError, ValueError):
    exit_code = 3

    def __init__(self, message, row=None, column=None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.column = column


class NumericError(KernormError, ArithmeticError):
    exit_code = 4

    def __init__(self, message, iterations=None, seed=None):
        super().__init__(message)
        self.iterations = iterations
        self.seed = seed
