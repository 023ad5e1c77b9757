"""Symmetric gl1 homology of braid closures."""
from .braid import BraidWord, parse_braid, render
from .errors import Gl1HomError, InputError, InternalFault

__version__ = "0.1.0"

__all__ = ["BraidWord", "parse_braid", "render", "Gl1HomError", "InputError", "InternalFault"]
