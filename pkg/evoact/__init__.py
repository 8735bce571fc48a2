"""evoact - Evolutionary discovery of parametric activation functions."""

__version__ = "0.1.0"
