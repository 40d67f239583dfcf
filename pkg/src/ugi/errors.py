"""Exception hierarchy shared by the library and the command line."""


class UGIError(Exception):
    """Base class for all errors raised by :mod:`ugi`."""


class InputError(UGIError, ValueError):
    """Malformed, mismatched or out-of-contract input."""


class NumericalError(UGIError, ArithmeticError):
    """A numerical procedure failed to converge or left its validated domain."""
