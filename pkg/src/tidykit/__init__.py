"""Finite groups from Cayley tables, with two independent tidiness deciders."""

from .core import (
    ElementSet,
    Group,
    are_isomorphic,
    direct_product,
    from_cayley_table,
    from_permutation_generators,
    generated_subgroup,
    is_normal,
    is_subgroup,
    load_group,
    quotient,
    semidirect_product,
)
from .errors import TidyKitError

__version__ = "0.1.0"

__all__ = [
    "ElementSet",
    "Group",
    "TidyKitError",
    "are_isomorphic",
    "direct_product",
    "from_cayley_table",
    "from_permutation_generators",
    "generated_subgroup",
    "is_normal",
    "is_subgroup",
    "load_group",
    "quotient",
    "semidirect_product",
]
