"""Construction and verification of 2x2 hypergeometric matrix Bochner pairs."""
__version__ = "0.1.0"
