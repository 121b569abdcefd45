"""Exception types shared across the solver."""


class EqstopError(Exception):
    """Base class for solver errors."""


class ModelValidationError(EqstopError):
    """Raised when a chain, reward or discount fails its invariants."""


class DimensionMismatch(EqstopError):
    """Operands defined over different state sets."""


class HorizonExhausted(EqstopError):
    """The horizon cap was reached before the target interval width.

    Carries the interval that was achieved so callers can decide whether
    the looser enclosure is still useful.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class EnumerationTooLarge(EqstopError):
    """A subset sweep would exceed the configured enumeration cap."""


class IndeterminateMembership(EqstopError):
    """A strict-inequality membership could not be certified either way."""

    def __init__(self, state_label, interval):
        super().__init__(
            f"membership of state {state_label!r} undecidable: reward sits "
            f"inside the deviation-value interval [{interval.lo!r}, {interval.hi!r}] "
            f"at the horizon cap"
        )
        self.state_label = state_label
        self.interval = interval


class IndeterminateCatalog(EqstopError):
    """A catalog operation needs every region decided, but some were not."""
