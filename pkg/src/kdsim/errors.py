"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DomainError (and
subclasses) -> 3, ConvergenceError / NumericsError -> 4.
"""


class DomainError(ValueError):
    """Input lies outside the supported or analytically valid domain."""


class DegenerateStateError(DomainError):
    """Antisymmetrization of a symmetric state; the message carries '0/0'."""


class ContractError(ValueError):
    """Arguments that belong to different computations were mixed up."""


class ConvergenceError(RuntimeError):
    """An iterative procedure exhausted its iteration budget."""


class NumericsError(RuntimeError):
    """A numerical routine produced or encountered non-finite values."""


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""
