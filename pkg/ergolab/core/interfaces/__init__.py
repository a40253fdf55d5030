"""Interfaces defining the contracts between ergolab components."""
