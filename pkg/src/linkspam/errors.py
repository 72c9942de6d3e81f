"""Exception types shared across the package."""


class LinkSpamError(Exception):
    """Base class for every error raised by linkspam."""


class ParseError(LinkSpamError, ValueError):
    """Malformed input file; ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class InvalidInputError(LinkSpamError, ValueError):
    pass


class NotFoundError(LinkSpamError, KeyError):
    def __str__(self):
        # KeyError would otherwise repr() the message
        return str(self.args[0]) if self.args else ""
