"""Exception types shared across the laboratory modules."""


class PilotLabError(Exception):
    """Base class for all package-specific failures."""


class GridCapError(PilotLabError, ValueError):
    """A grid or dense operator would exceed the configured size cap."""


class UnsupportedBoundaryError(PilotLabError, ValueError):
    """An operation was requested on a boundary type it cannot handle."""


class EvolutionDivergedError(PilotLabError, FloatingPointError):
    """Non-finite amplitudes appeared during time evolution."""


class NodeProximityError(PilotLabError, RuntimeError):
    """Guidance was evaluated where the (component-summed) density is
    below the node threshold.  Carries the offending density value so
    callers can decide to retry with a smaller step."""

    def __init__(self, message, density=None):
        super().__init__(message)
        self.density = density


class StaleEnsembleError(PilotLabError, ValueError):
    """Ensemble and wavefunction timestamps do not match."""


class BranchSeparationError(PilotLabError, RuntimeError):
    """Pointer branches did not separate enough for a conclusive
    measurement.  Carries the separation metric."""

    def __init__(self, message, separation=None):
        super().__init__(message)
        self.separation = separation


class SimulationTimeoutError(PilotLabError, RuntimeError):
    """A transport experiment did not reach its target within the
    allotted number of steps."""


class ChargeNeutralityError(PilotLabError, ValueError):
    """Periodic Poisson problem with a non-neutral source."""


class MissingHistoryError(PilotLabError, ValueError):
    """A time derivative was requested from a single snapshot."""


class ZeroModeError(PilotLabError, ValueError):
    """The zero-frequency mode was included where it must be excluded."""


class NonNormalizableError(PilotLabError, ValueError):
    """A Gaussian width lost its positive real part."""


class WindowError(PilotLabError, ValueError):
    """Events fall outside the validity window of a lattice comparison."""


class ConfigError(PilotLabError, ValueError):
    """Invalid or unknown experiment configuration."""
