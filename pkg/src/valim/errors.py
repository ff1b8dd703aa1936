"""Shared exception types."""


class ValimError(Exception):
    """Base class for every law violation or misuse the library reports."""


class SizeLimit(ValimError):
    """An enumeration or materialization would exceed its configured bound."""

    def __init__(self, what, bound):
        self.what = what
        self.bound = bound
        super().__init__(f"{what} exceeds the configured bound {bound}")


class BadDocument(ValimError):
    """A JSON document is malformed or fails cross-reference resolution."""
