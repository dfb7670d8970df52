"""Helper functions for the campaign HTTP layer"""

from .decorators import optional_float, optional_int

__all__ = ["optional_float", "optional_int"]
