"""Exception types, mapped onto CLI exit codes by ``coregae.cli``."""


class CoregaeError(Exception):
    """Base class for package errors."""


class ParseError(CoregaeError):
    """Malformed input file (carries file context and line number)."""


class ValidationError(CoregaeError):
    """Inputs are well-formed but violate a documented precondition."""


class NumericError(CoregaeError):
    """Non-finite values or numerical breakdown during optimization."""
