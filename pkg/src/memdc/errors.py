"""Exception types with stable machine-readable codes.

Every error raised by the simulator carries a short ``code`` string so the
CLI and callers can branch on failure modes without parsing messages.
"""


class SimulationError(Exception):
    """Base class for all simulator errors."""

    code = "simulation-error"

    def __init__(self, message=""):
        super().__init__(message or self.code)


class NoSwitchingDirectionError(SimulationError):
    """Zero write amplitude gives no SET/RESET direction."""

    code = "no-switching-direction"


class BadAddressError(SimulationError):
    """Crossbar address outside the array."""

    code = "bad-address"


class DegenerateDistributionError(SimulationError):
    """Target-state distribution produces colliding output voltages."""

    code = "degenerate-distribution"

    def __init__(self, message="", colliding_pair=None):
        super().__init__(message)
        self.colliding_pair = colliding_pair


class EnumerationTooLargeError(SimulationError):
    """Combination count exceeds the exhaustive-enumeration limit."""

    code = "enumeration-too-large"


class TargetOutOfRangeError(SimulationError):
    """Requested output voltage outside the enumerable range."""

    code = "target-out-of-range"


class UnphysicalCapacitanceError(SimulationError):
    """Capacitance matrix is not positive definite (C1*C2 <= Cm^2)."""

    code = "unphysical-capacitance"


class UnsortedAxisError(SimulationError):
    """Delivered gate-voltage axis is not monotonic."""

    code = "unsorted-axis"


class UnderdeterminedProtocolError(SimulationError):
    """Pulse-train trace lacks the amplitude coverage needed for fitting."""

    code = "underdetermined-protocol"


class FitDivergedError(SimulationError):
    """Least-squares fit hit its iteration budget without converging."""

    code = "fit-diverged"

    def __init__(self, message="", best_params=None, best_residual=None):
        super().__init__(message)
        self.best_params = best_params
        self.best_residual = best_residual


class ConfigError(SimulationError):
    """Invalid experiment configuration (CLI exit code 2)."""

    code = "config-error"
