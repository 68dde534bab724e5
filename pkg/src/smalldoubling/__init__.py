"""Small doubling in ordered groups: exact arithmetic, classification and exhaustive checks."""

from .core import (
    DoublingReport,
    FiniteSubset,
    Ordering,
    commutator,
    commute,
    compare,
    conjugate,
    doubling_report,
    inv,
    mul,
    pairwise_commuting,
    power,
    product_set,
    square,
)
from .groups import (
    BS12,
    FIB,
    HEIS,
    BSElement,
    FibElement,
    GroupError,
    GroupTag,
    HeisElement,
    MixedGroupsError,
    ParseError,
    ZdElement,
    format_element,
    generators,
    identity,
    parse_element,
    parse_tag,
    zd,
)

__version__ = "0.1.0"
