"""Exception types shared across the toolkit."""


class ValidationError(ValueError):
    """An input violates a documented invariant; the message names it."""


class ConfigError(ValueError):
    """A configuration document is malformed; the message carries the key path."""


class NumericalError(RuntimeError):
    """A numerical procedure failed in a way validation could not catch."""


class SingularityError(NumericalError):
    """A denominator or matrix became numerically singular."""


class ConvergenceError(NumericalError):
    """An iterative solve did not converge.

    Carries ``last_step`` (the last converged equilibrium step, or None)
    and ``path`` (the partial equilibrium path up to the failure).
    """

    def __init__(self, message, last_step=None, path=None):
        super().__init__(message)
        self.last_step = last_step
        self.path = path
