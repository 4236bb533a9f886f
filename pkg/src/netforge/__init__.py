"""Classification of orthogonal Latin square pairs and realizability of (4,k)-nets."""

__version__ = "0.1.0"
