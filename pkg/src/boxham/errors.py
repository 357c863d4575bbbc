"""Exception types shared across the package."""


class BoxhamError(Exception):
    """Base class for all package-specific errors."""


class VolumeError(BoxhamError):
    """Geometry problem: site count over the cap, box outside the radius,
    or a construction that needs more shells than the partition holds."""


class IncompleteSampleError(BoxhamError):
    """A disorder sample is missing a value for a materialized box."""


class SpectralProximityError(BoxhamError):
    """A linear solve at spectral parameter z sat too close to the spectrum.

    Carries the worst relative solver residual observed so the caller can
    report how close the call was.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class ConvergenceError(BoxhamError):
    """An iterative eigensolver hit its iteration cap."""


class MagnitudeError(BoxhamError):
    """A requested quantity left the usefully representable floating range."""


class CombinatorialLimitError(BoxhamError):
    """An exhaustive enumeration would exceed its configured cap."""


class DegenerateInputError(BoxhamError):
    """Input that the construction cannot meaningfully process
    (e.g. coincident points where a positive gap is required)."""


class EmbeddingError(BoxhamError):
    """A cosine cannot be embedded in the requested cyclotomic field."""


class MatchingError(BoxhamError):
    """Sorted assignment between exact and predicted spectra is ambiguous."""

    def __init__(self, message: str, indices: tuple[int, ...] = ()):
        super().__init__(message)
        self.indices = indices


class ConfigError(BoxhamError):
    """Malformed experiment configuration.

    ``line`` is the 1-based line number in the config file when known,
    ``field`` the offending (or missing) key.
    """

    def __init__(self, message: str, *, line: int | None = None, field: str | None = None):
        super().__init__(message)
        self.line = line
        self.field = field


class PrecisionWarning(UserWarning):
    """r^2-scale arithmetic is about to eat more than 1e-3 of the quantity
    under test; the caller should switch to compensated arithmetic."""
