"""Exception types shared across the package.

Every exception carries a stable ``code`` string so the CLI can report
machine-readable failures; the codes are part of the external contract.
"""


class TemporaError(Exception):
    """Base class for all package errors."""

    code = "ERROR"


class TimeNotInScaleError(TemporaError):
    """A time was queried that does not belong to the time scale."""

    code = "TIME_NOT_IN_SCALE"


class NotRegressiveError(TemporaError):
    """1 + mu*p hit zero (or the wrong sign where positivity is required)."""

    code = "NOT_REGRESSIVE"


class AtMaximumError(TemporaError):
    """Delta derivative requested at the left-scattered maximum."""

    code = "AT_MAXIMUM"


class EmptyPopulationError(TemporaError):
    """Contact rate evaluated on a state with nonpositive total population."""

    code = "EMPTY_POPULATION"


class H1ViolationError(TemporaError):
    """Exogenous contact-rate signal left its declared [lambda_L, lambda_U]."""

    code = "H1_VIOLATION"


class NonfiniteStateError(TemporaError):
    """Integration produced a nonfinite state, or positivity could not be restored."""

    code = "NONFINITE_STATE"


class MismatchedTrajectoriesError(TemporaError):
    """Pairwise trajectory analysis called on incompatible trajectories."""

    code = "MISMATCHED_TRAJECTORIES"


class DegenerateBoundsError(TemporaError):
    """Certificate requested from permanence bounds with min lower bound <= 0."""

    code = "DEGENERATE_BOUNDS"


class ConfigError(TemporaError):
    """Configuration file could not be parsed or validated."""

    code = "CONFIG_PARSE"
