"""Exception types shared across the package."""


class ParseError(ValueError):
    """Malformed ratings input; carries the offending line number when known."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class DegenerateModelError(ValueError):
    """A factor model cannot support prediction (no rows, or max dot <= 0)."""


class DegeneratePairError(ValueError):
    """A sampled user/item pair has a dot product below the positivity floor."""


class DivergenceError(RuntimeError):
    """Training produced non-finite factor entries."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch
