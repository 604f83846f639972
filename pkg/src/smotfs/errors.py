"""Exception types shared across the package."""


class SmOtfsError(Exception):
    """Base class for all package errors."""


class DimensionError(SmOtfsError):
    """An input has a length or shape inconsistent with the frame config."""


class InvalidSymbolError(SmOtfsError):
    """A symbol is not a member of the configured constellation."""


class ConfigurationError(SmOtfsError):
    """A configuration value is out of range or internally inconsistent."""


class BudgetExceededError(SmOtfsError):
    """An enumeration would exceed the configured candidate/hypothesis cap."""
