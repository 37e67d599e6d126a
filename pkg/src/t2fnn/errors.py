"""Exception types shared across the package."""


class T2FNNError(Exception):
    """Base class for all package-specific errors."""


class DegenerateFiringError(T2FNNError):
    """Raised by :func:`t2fnn.network.normalize` when every rule fires with
    numerically zero strength. Inference substitutes uniform weights instead
    of raising; see ``InferenceCache.degenerate_levels``."""


class NonFiniteUpdateError(T2FNNError):
    """A learner step drove at least one parameter to inf/nan, which usually
    means the Euler step size is too large for the current gains."""


class DivergedError(T2FNNError):
    """A simulated plant output exceeded the divergence sentinel."""

    def __init__(self, step, value, message=None):
        self.step = step
        self.value = value
        super().__init__(message or f"plant output diverged at step {step} (|y|={value:.3e})")


class EmptySequenceError(T2FNNError):
    """An aggregate (e.g. RMSE) was requested over an empty sequence."""
