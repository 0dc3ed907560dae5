"""Meaning-space analysis of labeled text corpora.

Builds a word-category relative information gain (RIG) matrix, runs a
correlation PCA over it, picks the number of components to keep and
splits the categories of each component into positive, zero and
negative groups.
"""

from meaningspace.errors import NumericalError, ValidationError

__version__ = "0.1.0"

__all__ = ["NumericalError", "ValidationError", "__version__"]
