"""Core business logic for ergolab."""
