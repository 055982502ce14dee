"""perfweld - hybrid analytical / machine-learning performance models."""

__version__ = "0.1.0"
