"""Exception types shared across the package."""


class ResponsibilityError(ValueError):
    """Base class for domain errors (bad inputs, undefined quantities).

    The CLI maps every subclass to exit status 2.
    """


class InvalidDistributionError(ResponsibilityError):
    pass


class DegenerateOutcomeError(ResponsibilityError):
    """Raised when the outcome entropy H(Z) is zero and Resp(Z) is undefined."""


class ScenarioError(ResponsibilityError):
    pass


class EventLogError(ResponsibilityError):
    pass


class QuadratureError(ResponsibilityError):
    pass
