"""Data-parallel Naive Bayes document classification pipeline."""

__version__ = "0.1.0"
