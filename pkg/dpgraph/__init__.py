"""Differentially private release of all-pairs shortest-path distances."""
import logging

# Library modules only create loggers; entry points configure handlers.
logging.getLogger(__name__).addHandler(logging.NullHandler())

__version__ = "0.3.0"
