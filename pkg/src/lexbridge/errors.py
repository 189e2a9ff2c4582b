class LexbridgeError(Exception):
    """Base class for errors raised on bad input data."""


class DataError(LexbridgeError, ValueError):
    """Malformed or unusable input. ``line`` is 1-based when known."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = str(path)
        if line is not None:
            where = f"{where}:{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class UnknownTokenError(LexbridgeError, KeyError):
    def __init__(self, token):
        self.token = token
        super().__init__(token)

    def __str__(self):
        return f"token not in vocabulary: {self.token!r}"
