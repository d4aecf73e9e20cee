"""Shared exception base for the xstring package."""


class XStringError(Exception):
    """Base class for all typed errors raised by this package."""
