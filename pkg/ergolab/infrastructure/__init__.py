"""Concrete implementations of the ergolab interfaces."""
