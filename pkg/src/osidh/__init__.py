"""Oriented supersingular isogeny chains at desk scale.

Class-group key exchange computed purely on sequences of modular points,
plus the level-by-level key recovery attack on the naive variant and the
graph experiments around it.
"""

from .algebra import create_field
from .modpoly import load_db

__version__ = "0.1.0"

__all__ = ["create_field", "load_db", "__version__"]
