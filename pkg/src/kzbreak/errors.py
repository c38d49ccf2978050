"""Exception hierarchy shared by all modules."""


class KzError(Exception):
    """Base class for every error raised by this package."""


class DomainError(KzError, ValueError):
    """An argument lies outside the domain an operation supports."""


class DegenerateHamiltonianError(KzError, ValueError):
    """The two-level Hamiltonian is identically zero, eigenvectors undefined."""


class StiffnessError(KzError, RuntimeError):
    """The adaptive integrator could not make progress.

    ``time`` holds the simulation time at which the step size underflowed.
    """

    def __init__(self, message, time):
        super().__init__(f"{message} (t = {time!r})")
        self.time = time


class AccuracyError(KzError, RuntimeError):
    """A numerical procedure did not reach its accuracy target.

    ``achieved`` holds the best error bound that was reached.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message if achieved is None else f"{message} (achieved {achieved:.3e})")
        self.achieved = achieved


class UnsupportedRegimeError(KzError, ValueError):
    """The requested model parameters fall outside the implemented regime."""


class ExtractionError(KzError, ValueError):
    """A scaling quantity could not be extracted from the given data."""


class InsufficientDataError(KzError, ValueError):
    """Too few usable points remain for a fit."""


class ConfigError(KzError, ValueError):
    """An experiment configuration failed validation.

    ``path`` names the offending field, e.g. ``delta_max_khz[2]``.
    """

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
