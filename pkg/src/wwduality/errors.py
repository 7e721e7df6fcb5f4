"""Exception types raised by the library."""


class InvalidArgumentError(ValueError):
    """Input violates a documented precondition (dimension, range, hermiticity)."""


class ZeroProbabilityError(ValueError):
    """A quanton outcome has vanishing probability, so the projected detector
    state is undefined."""


class UndefinedOutcomeError(ValueError):
    """A readout vector is orthogonal to both conditional detector states."""


class IncompleteBasisError(ValueError):
    """Readout weights do not sum to one: the basis misses part of the state."""
