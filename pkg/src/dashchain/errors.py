"""Exception hierarchy.

Input-validation failures derive from ``ValueError`` so callers that only
care about "bad parameters" can catch that; numerical and decision gates
derive from :class:`DashchainError`.
"""


class DashchainError(Exception):
    """Base class for every error raised by this package."""


class ChainSpecError(DashchainError, ValueError):
    """Chain parameters violate a physical or structural constraint."""


class NonPositiveMass(ChainSpecError):
    pass


class NonPositiveStiffness(ChainSpecError):
    pass


class NegativeDamping(ChainSpecError):
    pass


class LengthMismatch(ChainSpecError):
    pass


class TooFewMasses(ChainSpecError):
    pass


class BothZero(DashchainError, ValueError):
    """gcd(0, 0) is undefined."""


class OracleDimensionExceeded(DashchainError):
    """An exact oracle was asked for a matrix larger than its cap."""


class DerivedStiffnessNonPositive(DashchainError, ValueError):
    """The counterexample construction produced k2 <= 0."""


class SearchExhausted(DashchainError):
    """A bounded enumeration found no qualifying candidate."""


class BadStep(DashchainError, ValueError):
    """Integration step or horizon is not usable."""


class NonFiniteState(DashchainError, ArithmeticError):
    """A simulated or computed quantity became inf/nan."""


# matrix_exponential reports non-finite input under the same type
NonFinite = NonFiniteState


class NotControllable(DashchainError):
    pass


class NotObservable(DashchainError):
    pass


class IllConditionedGramian(DashchainError):
    """Gramian condition number exceeded the threshold.

    Raised only when the caller asks for strict behaviour; by default the
    condition is reported on the plan and the synthesis still proceeds.
    """


class InsufficientSamples(DashchainError, ValueError):
    pass


class RankDeficientRegressor(DashchainError):
    pass
