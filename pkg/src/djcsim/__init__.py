"""Two-cavity Jaynes-Cummings entanglement dynamics in truncated Fock space."""

__version__ = "0.1.0"
