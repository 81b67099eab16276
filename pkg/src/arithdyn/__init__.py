"""
arithdyn - digit expansions in real bases, rotations, adic maps and toral codings.
"""

__version__ = "0.1.0"

from .cli import app, run

__all__ = ["app", "run", "__version__"]
