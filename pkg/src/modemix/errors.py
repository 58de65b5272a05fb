"""Exception hierarchy for modemix.

Validation problems subclass ``ValueError`` and numerical failures subclass
``RuntimeError`` so callers that only know the builtin types still catch them.
The CLI maps the two families to exit codes 2 and 3.
"""


class ModemixError(Exception):
    """Base class for all modemix errors."""


class ValidationError(ModemixError, ValueError):
    """Input violates a documented precondition."""


class WavelengthRangeError(ValidationError):
    """Wavelength lies outside a material validity window."""


class ConfigError(ValidationError):
    """Configuration document is malformed or inconsistent."""


class LabelParseError(ValidationError):
    """Mode label or triplet text does not follow the label grammar."""


class ScanValidationError(ValidationError):
    """Measured scan data is not usable."""


class GridMismatchError(ValidationError):
    """Fields live on different grids and would need resampling."""


class NormalizationError(ValidationError):
    """A quantity that must be normalized (or nonzero for normalization) is not."""


class ContractError(ValidationError):
    """Caller broke the contract of an operation."""


class UnknownLabelError(ModemixError, KeyError):
    """Mode label has no entry in a corrections map."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown label"


class NumericalError(ModemixError, RuntimeError):
    """A numerical procedure failed to produce a result."""


class SolverConvergenceError(NumericalError):
    """The sparse eigensolver did not converge or missed its residual tolerance."""


class ModeTrackingError(NumericalError):
    """A labelled mode could not be followed across wavelengths."""


class ClassificationError(NumericalError):
    """A mode field could not be labelled."""


class NoPhaseMatchError(NumericalError):
    """No sign change of the phase mismatch inside the search window."""


class IndeterminateBandError(NumericalError):
    """Phase mismatch vanishes identically; every wavelength is a root."""


class QpmSignError(NumericalError):
    """Poling period would be non-positive for the requested process."""


class OffBandError(NumericalError):
    """Point is not on a phase-matching band."""


class VerticalBandError(NumericalError):
    """Band is vertical in the (lambda_V, lambda_H) plane."""
