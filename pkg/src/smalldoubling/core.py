"""Group-agnostic algebra: products, conjugation, the order, and product sets."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .groups import (
    Element,
    GroupError,
    GroupTag,
    MixedGroupsError,
    format_element,
    identity,
)

__all__ = [
    "Ordering",
    "FiniteSubset",
    "DoublingReport",
    "mul",
    "inv",
    "power",
    "conjugate",
    "commutator",
    "commute",
    "compare",
    "product_set",
    "square",
    "pairwise_commuting",
    "doubling_report",
]


class Ordering(enum.Enum):
    LT = -1
    EQ = 0
    GT = 1


def _same(g: Element, h: Element) -> None:
    if g.tag != h.tag:
        raise MixedGroupsError(g.tag, h.tag)


def mul(g: Element, h: Element) -> Element:
    _same(g, h)
    return g._mul(h)


def inv(g: Element) -> Element:
    return g.inverse()


def power(g: Element, n: int) -> Element:
    """``g**n`` by repeated squaring; negative exponents go through the inverse."""
    if n < 0:
        g, n = g.inverse(), -n
    result = identity(g.tag)
    base = g
    while n:
        if n & 1:
            result = result._mul(base)
        n >>= 1
        if n:
            base = base._mul(base)
    return result


def conjugate(g: Element, x: Element) -> Element:
    """``g^x = x^-1 g x``."""
    _same(g, x)
    return x.inverse()._mul(g)._mul(x)


def commutator(g: Element, h: Element) -> Element:
    """``[g, h] = g^-1 h^-1 g h``."""
    _same(g, h)
    return g.inverse()._mul(h.inverse())._mul(g)._mul(h)


def commute(g: Element, h: Element) -> bool:
    _same(g, h)
    return g._mul(h) == h._mul(g)


def compare(g: Element, h: Element) -> Ordering:
    _same(g, h)
    return Ordering(g._cmp(h))


@dataclass(frozen=True)
class FiniteSubset:
    """A nonempty finite set of elements of one group, kept sorted by the group order.

    Build instances with :meth:`of`, which sorts and deduplicates.
    """

    tag: GroupTag
    elements: tuple[Element, ...]

    @classmethod
    def of(cls, elements: Iterable[Element]) -> "FiniteSubset":
        items = list(elements)
        if not items:
            raise GroupError("a finite subset needs at least one element")
        tag = items[0].tag
        for g in items:
            if g.tag != tag:
                raise MixedGroupsError(tag, g.tag)
        return cls(tag, tuple(sorted(set(items))))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)

    def __getitem__(self, i: int) -> Element:
        return self.elements[i]

    def __contains__(self, g: object) -> bool:
        return g in self.elements

    @property
    def min(self) -> Element:
        return self.elements[0]

    @property
    def max(self) -> Element:
        return self.elements[-1]

    def literals(self) -> list[str]:
        return [format_element(g) for g in self.elements]

    def __str__(self) -> str:
        return "{" + ", ".join(self.literals()) + "}"


def product_set(a: FiniteSubset, b: FiniteSubset) -> FiniteSubset:
    if a.tag != b.tag:
        raise MixedGroupsError(a.tag, b.tag)
    return FiniteSubset(a.tag, tuple(sorted({x._mul(y) for x in a for y in b})))


def square(s: FiniteSubset) -> FiniteSubset:
    return product_set(s, s)


def pairwise_commuting(s: Sequence[Element] | FiniteSubset) -> bool:
    items = list(s)
    for i, x in enumerate(items):
        for y in items[i + 1:]:
            if x._mul(y) != y._mul(x):
                return False
    return True


@dataclass(frozen=True)
class DoublingReport:
    k: int
    square_size: int
    meets_3k_minus_4: bool
    exactly_3k_minus_3: bool
    exactly_3k_minus_2: bool
    pairwise_commuting: bool

    @classmethod
    def from_sizes(cls, k: int, square_size: int, commuting: bool) -> "DoublingReport":
        return cls(
            k=k,
            square_size=square_size,
            meets_3k_minus_4=square_size <= 3 * k - 4,
            exactly_3k_minus_3=square_size == 3 * k - 3,
            exactly_3k_minus_2=square_size == 3 * k - 2,
            pairwise_commuting=commuting,
        )


def doubling_report(s: FiniteSubset) -> DoublingReport:
    return DoublingReport.from_sizes(len(s), len(square(s)), pairwise_commuting(s))
