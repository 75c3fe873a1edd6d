"""
Exception hierarchy for astkit.

Library code raises these; the command-line layer maps them to exit codes
and error sidecar records.
"""

from typing import Optional


class AstkitError(Exception):
    """Base class for all astkit errors."""


class InputError(AstkitError, ValueError):
    """Invalid argument or malformed input data."""


class ConfigurationError(AstkitError):
    """Invalid or unsatisfiable configuration (unknown language, bad YAML...)."""


class TreeFormatError(InputError):
    """
    Malformed serialized tree (SBT token stream or s-expression).

    Parameters
    ----------
    message : str
        Human readable description
    position : int, optional
        Token index (SBT) or character offset (s-expression) of the problem
    """

    def __init__(self, message: str, position: Optional[int] = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ParseFailure(AstkitError):
    """The parser backend produced neither a method node nor a usable fragment."""
