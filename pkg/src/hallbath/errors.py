"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid parameters: bad config fields, dimension mismatches, guard violations."""


class NumericalFailureError(RuntimeError):
    """The integrator left its validity envelope (e.g. norm drift beyond tolerance)."""


class EnsembleMemberError(NumericalFailureError):
    """A disorder-ensemble member failed its numerical guards.

    Carries the member index and derived seed so the offending realization
    can be reproduced in isolation.
    """

    def __init__(self, member: int, seed: int, cause: Exception):
        self.member = member
        self.seed = seed
        self.cause = cause
        super().__init__(f"ensemble member r={member} (seed {seed}) failed: {cause}")
