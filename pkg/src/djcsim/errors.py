"""Exception types shared across the package.

Exit-code mapping used by the CLI: ConfigurationError -> 2, every other
SimulationError -> 3.
"""


class SimulationError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(SimulationError):
    """Invalid user input: parameters, presets, config files."""


class ContractViolationError(SimulationError):
    """A numerical precondition or postcondition failed."""


class CutoffTooSmallError(SimulationError):
    """The Fock-space truncation discards too much probability."""
