"""Exception hierarchy.

Two branches matter for the CLI exit codes: ConfigurationError maps to
exit code 2 (bad input, violated preconditions), NumericalError maps to
exit code 3 (a computation failed at runtime).
"""


class RinghopfError(Exception):
    """Base class for all package errors."""


class ConfigurationError(RinghopfError):
    """Invalid user input or violated precondition."""


class NumericalError(RinghopfError):
    """A numerical procedure failed."""


# -- configuration / precondition errors --------------------------------

class InvalidRange(ConfigurationError):
    """A coupling range lies outside {1, ..., n-1}."""


class DihedralAsymmetry(ConfigurationError):
    """Dihedral symmetry requested but ranges not closed under r -> n-r."""


class DimensionMismatch(ConfigurationError):
    """State vector length does not match n * node_dim."""


class AllDecoupled(ConfigurationError):
    """Every off-diagonal coupling coefficient is zero."""


class InvalidMode(ConfigurationError):
    """Wavenumber outside the strictly rotating band 1 <= k < n/2."""


class NotHopfMode(ConfigurationError):
    """Prediction requested for a mode with no imaginary part."""


class DoubleEigenvalue(ConfigurationError):
    """Prediction requested for a dihedral double mode (branch enumeration
    is out of scope; only the flag is reported)."""


class WindowTooShort(ConfigurationError):
    """Sampling window shorter than five estimated periods."""


class ConfigError(ConfigurationError):
    """Malformed configuration document or CLI flags."""


# -- numerical errors ----------------------------------------------------

class EigensolverNoConvergence(NumericalError):
    """QR iteration exceeded its sweep cap."""


class Diverged(NumericalError):
    """Trajectory norm exceeded the divergence guard."""


class NonFinite(NumericalError):
    """NaN or Inf encountered during integration."""


class NoOscillation(NumericalError):
    """Trace amplitude below the oscillation floor."""


class IrregularPeriod(NumericalError):
    """Successive crossing intervals spread by more than 5%."""


class AmbiguousLag(NumericalError):
    """Correlation peak or rotation step not unique."""


class InternalConsistency(NumericalError):
    """A self-verification pass failed; indicates a bug, not bad input."""
