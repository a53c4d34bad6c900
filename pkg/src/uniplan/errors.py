"""Exception hierarchy shared by every module."""

from __future__ import annotations


class UniplanError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(UniplanError, ValueError):
    pass


class InvalidState(UniplanError, ValueError):
    """A state handed to a transition function lies outside the free space."""


class ResourceLimitError(UniplanError):
    """A request exceeds a configured size or range bound."""


class DegenerateEnvironment(UniplanError, ValueError):
    """Obstacles touch or overlap, so no positive clearance exists."""


class ParseError(UniplanError, ValueError):
    pass


class MissingStartError(ParseError):
    pass


class MissingGoalError(ParseError):
    pass


class RaggedRowsError(ParseError):
    pass


class DisconnectedEnvironmentError(ParseError):
    pass
