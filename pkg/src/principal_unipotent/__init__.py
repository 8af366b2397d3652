"""Principal unipotent representations of real reductive groups, computed from root data."""

__version__ = "0.1.0"
