"""Exception types shared across the package."""


class ContractError(ValueError):
    """An input violates a documented shape or consistency requirement."""


class DomainError(ValueError):
    """A numeric argument lies outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """A configuration file or experiment description is invalid."""


class DimensionalityError(ValueError):
    """A construction needs more spatial degrees of freedom than available."""
