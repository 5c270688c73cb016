"""Turns project record files into 384-d vector files for the analysis toolkit."""

__version__ = "0.1.0"
