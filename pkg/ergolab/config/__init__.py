"""Application settings and experiment configuration."""
