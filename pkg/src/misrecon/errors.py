"""Shared exception types with distinct CLI exit codes."""


class InputError(ValueError):
    """Malformed input: bad file, bad flag, or a violated operation precondition."""


class InternalError(RuntimeError):
    """A construction broke one of its own guarantees; indicates a bug."""
