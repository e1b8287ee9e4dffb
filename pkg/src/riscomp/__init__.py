"""Monte Carlo simulator for RIS-assisted CoMP-NOMA downlink networks."""

__version__ = "0.1.0"
