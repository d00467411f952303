"""Exact computation in the space of closed relations over the Cantor set.

The package models the closure of the prefix-exchange homeomorphism group
of 2^omega inside the compact space of closed binary relations: finite
index relations and their semigroup (`finrel`), clopen combinatorics
(`cantor`), the group itself (`homeo`), relations as coherent trace towers
(`towers`), certificate-producing witness constructions (`constructions`),
and a deterministic text-format CLI (`formats`, `cli`).
"""

from . import cantor, constructions, finrel, formats, homeo, towers
from .cantor import ClopenSet, Partition, level_partition
from .errors import (
    BudgetError,
    PreconditionError,
    RoelckeError,
    ValidationError,
)
from .finrel import IndexRelation
from .homeo import PrefixMap
from .towers import RelationTower

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "ClopenSet",
    "IndexRelation",
    "Partition",
    "PreconditionError",
    "PrefixMap",
    "RelationTower",
    "RoelckeError",
    "ValidationError",
    "cantor",
    "constructions",
    "finrel",
    "formats",
    "homeo",
    "level_partition",
    "towers",
]
