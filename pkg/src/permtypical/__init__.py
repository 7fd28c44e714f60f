"""Joint typicality of permuted sequences: permutation algebra, Bell
signatures, counting sandwiches, typicality probabilities and their bounds."""

from . import bounds, counting, dist, montecarlo, partitions, perm_core, typicality
from .errors import InfeasibleEnumeration

__version__ = "0.1.0"

__all__ = [
    "bounds",
    "counting",
    "dist",
    "montecarlo",
    "partitions",
    "perm_core",
    "typicality",
    "InfeasibleEnumeration",
]
