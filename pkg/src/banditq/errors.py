"""Exception types shared across the package.

Each class names one failure condition; operations raise the most specific
one that applies so callers (and tests) can match on identity.
"""


class BanditQError(Exception):
    """Base class for all package errors."""


class InvalidConfigError(BanditQError):
    """A config violates one or more invariants.

    Carries the full list of violations so callers can report every problem
    at once instead of fixing them one at a time.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NonFiniteInput(BanditQError, ValueError):
    """An input vector contains NaN or infinity."""


class OutOfRangeInput(BanditQError, ValueError):
    """A value lies outside its documented range (e.g. rewards outside [0, 1])."""


class NegativeInput(BanditQError, ValueError):
    """A quantity that must be non-negative (queue, weight) is negative."""


class EmptyHistory(BanditQError, ValueError):
    """An operation requiring at least one round of history received none."""


class PreconditionViolated(BanditQError, ValueError):
    """A stated precondition of a diagnostic check does not hold."""


class SourceExhausted(BanditQError):
    """A reward source cannot supply the requested round."""


class ReplayRowMissing(SourceExhausted):
    """A replay file has no row for the requested round."""


class ReplayValueOutOfRange(BanditQError, ValueError):
    """A replay file contains a reward outside [0, 1]."""


class HistoryShorterThanWindow(BanditQError, ValueError):
    """Windowed floor requested on a history shorter than the window."""


class EmptyBenchmarkSet(BanditQError, ValueError):
    """The benchmark's lower bounds sum to more than one; no feasible point exists."""


class LengthMismatch(BanditQError, ValueError):
    """Two inputs that must describe the same episode disagree in shape."""


class BadInterval(BanditQError, ValueError):
    """An audit interval falls outside [1, T] or is empty."""


class NonPositiveValue(BanditQError, ValueError):
    """A log-log fit received a value that is not strictly positive."""


class TooFewPoints(BanditQError, ValueError):
    """A fit received fewer than three distinct horizons."""
