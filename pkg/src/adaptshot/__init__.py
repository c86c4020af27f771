"""Shot-frugal ADAPT-VQE simulation engine."""

__version__ = "0.1.0"
