"""soa3 - Strong orthogonal arrays of strength three"""

__version__ = "0.1.0"
