"""GaussEnt-LOCC: two-mode Gaussian entanglement from local data and parity-conditioned moments."""

__version__ = "0.1.0"
