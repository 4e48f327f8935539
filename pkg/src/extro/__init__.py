"""Extraversion inference and cohort behavior analytics for archived microblog data."""

__version__ = "0.1.0"
