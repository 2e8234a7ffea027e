"""Exception and warning types used across the package."""


class GncfError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(GncfError):
    """A link configuration document is malformed or violates an invariant."""


class ModelDomainError(GncfError):
    """Inputs are outside the domain the closed-form model is defined on."""


class ModelValidityWarning(UserWarning):
    """The model is still evaluated, but one of its fitting assumptions is
    degraded (e.g. the effective single-exponential loss profile changes sign
    along the span)."""
