"""Chain-level obstructions and cohomological bounds for higher topological complexity."""

__version__ = "0.1.0"

from .chains import ChainComplex, ChainElement, ChainMap, parse_chain, verify_chain_map
from .cyclic import GroupSpec, parse_group
from .smith import homology, is_boundary, smith_normal_form

__all__ = [
    "ChainComplex", "ChainElement", "ChainMap", "GroupSpec", "homology", "is_boundary",
    "parse_chain", "parse_group", "smith_normal_form", "verify_chain_map", "__version__",
]
