"""Exception taxonomy.

Two families, matching the CLI exit codes: user/input problems (exit 1) and
numerical pathologies (exit 2).  Library code raises these instead of bare
ValueError/RuntimeError so callers can route them.
"""


class RabiChaosError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RabiChaosError, ValueError):
    """Invalid coordinates or parameters (e.g. atomic point outside the disk)."""


class ShellError(DomainError):
    """Requested energy shell is unreachable from the given section point."""


class ConfigError(RabiChaosError, ValueError):
    """Malformed or invalid run configuration."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericalError(RabiChaosError, RuntimeError):
    """Base class for failures of the numerics rather than of the input."""


class SingularityError(NumericalError):
    """Trajectory approached the atomic-disk boundary where the flow is singular."""


class StepSizeError(NumericalError):
    """Adaptive step size underflowed; integration cannot proceed."""


class TruncationError(NumericalError):
    """Fock truncation too small: the coherent state loses more than the allowed tail mass."""


class EigensolverError(NumericalError):
    """Dense Hermitian eigendecomposition failed to converge."""
