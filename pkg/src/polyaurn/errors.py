"""Exception types shared across the package."""


class UrnModelError(ValueError):
    """Invalid model input: bad counts, rules, criteria, or plan fields."""


class HorizonError(UrnModelError):
    """A query time lies beyond the simulated horizon."""


class BudgetExceededError(RuntimeError):
    """A configured resource bound was hit before the computation finished."""


class StateBudgetError(BudgetExceededError):
    """Exact dynamic programming visited more states than the budget allows."""


class PathCapError(BudgetExceededError):
    """Path enumeration would produce more paths than the configured cap."""


class EventCapError(BudgetExceededError):
    """A continuous-time run hit the hard event-count cap before its horizon."""


class TailMassError(BudgetExceededError):
    """Truncated lattice too small: tail mass exceeds the tolerance."""
