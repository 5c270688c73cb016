"""Cross-lingual semantic drift analysis over shared sentence-embedding spaces."""

__version__ = "0.1.0"
