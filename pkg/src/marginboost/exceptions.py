"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed user input: bad files, bad shapes, bad flag values."""


class NumericError(RuntimeError):
    """A numerical routine failed to converge or produced non-finite values."""
