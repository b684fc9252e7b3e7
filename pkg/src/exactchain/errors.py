"""Exception hierarchy shared across the package.

Every error that maps to a CLI exit code or to a documented contract
lives here so callers can catch them without importing internals.
"""


class ExactChainError(Exception):
    """Base class for all package errors."""


class ConfigError(ExactChainError):
    """A run configuration failed to parse or validate (CLI exit code 2)."""


class MalformedTableError(ExactChainError):
    """A transition table row does not normalize to 1."""


class NotSpontaneousError(ExactChainError):
    """The marker string contains a symbol with zero worst-case probability.

    Backward construction relies on every marker symbol being producible
    from a uniform alone; with a zero infimum the scheme cannot regenerate.
    """


class DepthExceededError(ExactChainError):
    """No certified saturation depth exists for an exhaustive infimum."""


class KMaxExceededError(ExactChainError):
    """A uniform fell beyond the last resolved threshold (truncation tail)."""


class StepBudgetError(ExactChainError):
    """Backward construction exceeded its step budget (CLI exit code 4).

    Either the threshold tail is not summable for this kernel or the
    budget is too small; the run is aborted rather than truncated.
    """


class NotIrreducibleError(ExactChainError):
    """The lifted finite-order chain has more than one closed class."""


class TooFewBlocksError(ExactChainError):
    """Not enough interior regeneration blocks for a meaningful test."""


class ValidationFailure(ExactChainError):
    """A statistical acceptance check failed (CLI exit code 3)."""
