"""Ergolab - executable thermodynamic formalism for shifts and suspension flows."""

__version__ = "0.3.0"
