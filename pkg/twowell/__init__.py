"""twowell - entanglement signatures of a two-component BEC in two wells."""

__version__ = "0.1.0"
