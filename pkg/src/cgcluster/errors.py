"""Exception types shared across the package."""


class FormatError(ValueError):
    """Raised when a tensor file or CSV artifact cannot be parsed."""
