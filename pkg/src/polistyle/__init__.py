"""Corpus stylometry: complexity, category lexicons, significance marks,
composite scores, intertextual distance and neighbor-joining trees."""

__version__ = "0.1.0"
