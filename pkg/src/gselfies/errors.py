"""Exception types raised by the package."""


class GselfiesError(Exception):
    """Base class for all package errors."""


class ParseError(GselfiesError):
    """Malformed molecule or template text."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class KekulizationError(ParseError):
    """Aromatic system admits no alternating single/double assignment."""


class GraphError(GselfiesError):
    """Invalid molecular-graph construction or lookup."""


class GroupError(GselfiesError):
    """Invalid group definition or group-set file."""


class TokenError(GselfiesError):
    """Malformed token string in strict lexing mode."""


class EncodeError(GselfiesError):
    """Molecule cannot be encoded (unsupported element, disconnected, ...)."""
