"""Transfinite sequence orders, tree plateaux and renormings of C_0(tree)-type spaces.

Subpackages: ``zorder`` (the ordered sets Y and Z), ``trees`` (finite and
generated trees, plateaux, bad points), ``renorm`` (tail infima and the
plateau pipeline). ``game`` holds the tree game and ``cli`` the command line.
"""

from .errors import RenormLabError
from .ordinals import Ordinal, format_ordinal, parse_ordinal
from .zorder import ZSeq, z_compare

__version__ = "0.1.0"

__all__ = ["Ordinal", "RenormLabError", "ZSeq", "__version__", "format_ordinal", "parse_ordinal", "z_compare"]
