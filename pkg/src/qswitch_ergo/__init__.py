"""Work extraction from thermalizing channels in an indefinite causal order."""

__version__ = "0.1.0"
