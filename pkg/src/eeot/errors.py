"""Exception types raised by the library."""


class DegenerateChannelError(ValueError):
    """The attacked decision channel carries no usable information."""


class ProtocolError(RuntimeError):
    """The fusion-center protocol was driven into an invalid state."""


class UnsupportedModeError(ValueError):
    pass


class ConfigError(ValueError):
    """Bad experiment configuration; carries the offending key and line."""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key {key!r}")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
