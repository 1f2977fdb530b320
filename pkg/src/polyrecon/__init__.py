"""polyrecon: polyhedral scene reconstruction from sparse marker data."""

__version__ = "0.1.0"
