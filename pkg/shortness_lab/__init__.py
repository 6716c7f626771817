"""Construction and verification lab for tough non-Hamiltonian triangulations."""

__version__ = "1.0.0"
