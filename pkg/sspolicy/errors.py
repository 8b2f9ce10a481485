"""Exception hierarchy. Every error knows the CLI exit code it maps to."""


class SSPolicyError(Exception):
    exit_code = 2


class InstanceParseError(SSPolicyError):
    exit_code = 1

    def __init__(self, message: str, line: int = None):
        self.line = line
        prefix = f"line {line}: " if line else ""
        super().__init__(f"{prefix}{message}")


class InstanceValidationError(SSPolicyError):
    exit_code = 2

    def __init__(self, message: str, line: int = None):
        self.line = line
        prefix = f"line {line}: " if line else ""
        super().__init__(f"{prefix}{message}")


class InvalidParametersError(SSPolicyError, ValueError):
    exit_code = 2


class WindowError(SSPolicyError, IndexError):
    exit_code = 2


class MalformedPolicyError(SSPolicyError):
    exit_code = 2


class NumericalError(SSPolicyError):
    exit_code = 3


class GridTooSmallError(NumericalError):
    pass


class CycleNotBracketedError(NumericalError):
    def __init__(self, message: str, result=None):
        self.result = result
        super().__init__(message)
