"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid indices, parameters, or malformed in-memory data."""


class FormatError(ValueError):
    """A file could not be parsed or does not match its schema."""


class SizeGuardError(RuntimeError):
    """An exact solver was asked to enumerate more subsets than allowed."""


class DegenerateRatioError(RuntimeError):
    """Approximation ratio is undefined: the exact optimum is zero but the
    algorithm value is not."""
