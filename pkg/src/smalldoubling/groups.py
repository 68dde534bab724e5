"""Concrete ordered groups in exact normal form.

Four groups are provided, each with a multiplication law on canonical
coordinates and an explicit positive cone defining a bi-invariant order:

``zd(d)``
    The free abelian group Z^d, lexicographic order.
``heis``
    The discrete Heisenberg group. ``(i, j, k)`` stands for a^i b^j c^k with
    ``c = [a, b]`` central.
``fib``
    ``(Z^2) x| Z`` where the generator b acts on row vectors by the Fibonacci
    matrix ``[[0, 1], [1, 1]]``. ``(u, v; n)`` stands for a^u (a^b)^v b^n.
``bs12``
    BS(1,2) realized as affine maps ``x -> 2^n x + d`` with dyadic ``d``.
    The generators are ``a: x -> x + 1`` and ``b: x -> x / 2``.

Conjugation follows ``g^x = x^-1 g x`` and the commutator ``[g, h] = g^-1 h^-1 g h``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import ClassVar, Iterable, Union

__all__ = [
    "GroupError",
    "MixedGroupsError",
    "ParseError",
    "GroupTag",
    "HEIS",
    "FIB",
    "BS12",
    "zd",
    "parse_tag",
    "ZdElement",
    "HeisElement",
    "FibElement",
    "BSElement",
    "Element",
    "FibMatrixPower",
    "fibonacci",
    "fib_matrix_power",
    "fib_sign_rho",
    "fib_positive",
    "heis_positive",
    "bs_positive",
    "fib_mul",
    "heis_mul",
    "bs_mul",
    "identity",
    "generators",
    "derived_part_test",
    "centralizer_triviality_check",
    "parse_element",
    "format_element",
    "normalize_dyadic",
]

NEG, ZERO, POS = -1, 0, 1


class GroupError(ValueError):
    """Base class for invalid group operations."""


class MixedGroupsError(GroupError):
    def __init__(self, left: "GroupTag", right: "GroupTag") -> None:
        super().__init__(f"mixed groups: {left} and {right}")
        self.left = left
        self.right = right


class ParseError(GroupError):
    def __init__(self, message: str, text: str, pos: int) -> None:
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


@dataclass(frozen=True)
class GroupTag:
    kind: str
    dim: int = 0

    def __str__(self) -> str:
        return f"zd({self.dim})" if self.kind == "zd" else self.kind


HEIS = GroupTag("heis")
FIB = GroupTag("fib")
BS12 = GroupTag("bs12")


def zd(d: int) -> GroupTag:
    if d < 1:
        raise GroupError(f"zd dimension must be positive, got {d}")
    return GroupTag("zd", d)


_TAG_RE = re.compile(r"^\s*(?:(zd)\s*\(\s*(\d+)\s*\)|(heis|fib|bs12))\s*$", re.I)


def parse_tag(text: str) -> GroupTag:
    m = _TAG_RE.match(text)
    if not m:
        raise GroupError(f"unknown group {text!r} (expected zd(d), heis, fib or bs12)")
    if m.group(1):
        return zd(int(m.group(2)))
    return {"heis": HEIS, "fib": FIB, "bs12": BS12}[m.group(3).lower()]


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


# ---------------------------------------------------------------------------
# Fibonacci arithmetic


@lru_cache(maxsize=4096)
def fibonacci(n: int) -> int:
    """Fibonacci number f_n for any integer n, with f_{-n} = (-1)^(n+1) f_n."""
    if n < 0:
        m = -n
        f = fibonacci(m)
        return f if m % 2 == 1 else -f
    # fast doubling
    def pair(k: int) -> tuple[int, int]:
        if k == 0:
            return 0, 1
        f, g = pair(k >> 1)
        c = f * (2 * g - f)
        d = f * f + g * g
        return (d, c + d) if k & 1 else (c, d)

    return pair(n)[0]


@dataclass(frozen=True)
class FibMatrixPower:
    """The n-th power of ``[[0, 1], [1, 1]]`` stored as ``(f_{n-1}, f_n, f_n, f_{n+1})``."""

    n: int
    entries: tuple[int, int, int, int]

    @property
    def determinant(self) -> int:
        p, q, r, s = self.entries
        return p * s - q * r

    def __matmul__(self, other: "FibMatrixPower") -> tuple[int, int, int, int]:
        p, q, r, s = self.entries
        w, x, y, z = other.entries
        return (p * w + q * y, p * x + q * z, r * w + s * y, r * x + s * z)


@lru_cache(maxsize=4096)
def fib_matrix_power(n: int) -> FibMatrixPower:
    fn = fibonacci(n)
    return FibMatrixPower(n, (fibonacci(n - 1), fn, fn, fibonacci(n + 1)))


def _row_times_power(u: int, v: int, n: int) -> tuple[int, int]:
    """Row vector ``(u, v)`` times ``B^n``: the action of conjugation by b^n."""
    if n == 0:
        return u, v
    p, q, r, s = fib_matrix_power(n).entries
    return u * p + v * r, u * q + v * s


def fib_sign_rho(u: int, v: int) -> int:
    """Exact sign of ``u + v*phi`` with phi the golden ratio.

    Works on ``2(u + v*phi) = A + v*sqrt(5)`` with ``A = 2u + v``.
    """
    a = 2 * u + v
    if v == 0:
        return _sign(a)
    if a == 0:
        return _sign(v)
    if (a > 0) == (v > 0):
        return _sign(a)
    # opposite signs: the sqrt(5) term wins iff 5 v^2 > A^2
    return _sign(v) if 5 * v * v > a * a else _sign(a)


# ---------------------------------------------------------------------------
# Dyadic rationals as (numerator, exponent) with odd numerator


def normalize_dyadic(p: int, e: int) -> tuple[int, int]:
    """Reduce ``p / 2^e`` to an odd numerator (or ``(0, 0)``), allowing any integer e."""
    if p == 0:
        return 0, 0
    if e < 0:
        return p << -e, 0
    tz = (p & -p).bit_length() - 1
    if tz >= e:
        return p >> e, 0
    return p >> tz, e - tz


def _dy_add(p1: int, e1: int, p2: int, e2: int) -> tuple[int, int]:
    if e1 >= e2:
        return normalize_dyadic(p1 + (p2 << (e1 - e2)), e1)
    return normalize_dyadic((p1 << (e2 - e1)) + p2, e2)


def _dy_scale(p: int, e: int, n: int) -> tuple[int, int]:
    """``(p / 2^e) * 2^n``."""
    return normalize_dyadic(p, e - n)


def _dy_cmp(p1: int, e1: int, p2: int, e2: int) -> int:
    if e1 >= e2:
        return _sign(p1 - (p2 << (e1 - e2)))
    return _sign((p1 << (e2 - e1)) - p2)


# ---------------------------------------------------------------------------
# Element types


class _ElementBase:
    __slots__ = ()
    tag: GroupTag

    def _mul(self, other):  # pragma: no cover - overridden
        raise NotImplementedError

    def inverse(self):  # pragma: no cover - overridden
        raise NotImplementedError

    def is_positive(self) -> bool:  # pragma: no cover - overridden
        raise NotImplementedError

    def _cmp(self, other) -> int:  # pragma: no cover - overridden
        raise NotImplementedError

    def is_identity(self) -> bool:  # pragma: no cover - overridden
        raise NotImplementedError

    def __lt__(self, other) -> bool:
        _check(self, other)
        return self._cmp(other) < 0

    def __le__(self, other) -> bool:
        _check(self, other)
        return self._cmp(other) <= 0

    def __gt__(self, other) -> bool:
        _check(self, other)
        return self._cmp(other) > 0

    def __ge__(self, other) -> bool:
        _check(self, other)
        return self._cmp(other) >= 0

    def __mul__(self, other):
        _check(self, other)
        return self._mul(other)

    def __str__(self) -> str:
        return format_element(self)


def _check(g: _ElementBase, h: _ElementBase) -> None:
    if g.tag != h.tag:
        raise MixedGroupsError(g.tag, h.tag)


@dataclass(frozen=True, slots=True)
class ZdElement(_ElementBase):
    coords: tuple[int, ...]

    @property
    def tag(self) -> GroupTag:
        return GroupTag("zd", len(self.coords))

    def _mul(self, other: "ZdElement") -> "ZdElement":
        return ZdElement(tuple(x + y for x, y in zip(self.coords, other.coords)))

    def inverse(self) -> "ZdElement":
        return ZdElement(tuple(-x for x in self.coords))

    def is_identity(self) -> bool:
        return not any(self.coords)

    def is_positive(self) -> bool:
        for x in self.coords:
            if x:
                return x > 0
        return False

    def _cmp(self, other: "ZdElement") -> int:
        a, b = self.coords, other.coords
        return (a > b) - (a < b)


@dataclass(frozen=True, slots=True)
class HeisElement(_ElementBase):
    i: int
    j: int
    k: int

    tag: ClassVar[GroupTag] = HEIS

    def _mul(self, other: "HeisElement") -> "HeisElement":
        return heis_mul(self, other)

    def inverse(self) -> "HeisElement":
        return HeisElement(-self.i, -self.j, -self.k - self.i * self.j)

    def is_identity(self) -> bool:
        return self.i == 0 and self.j == 0 and self.k == 0

    def is_positive(self) -> bool:
        return heis_positive(self)

    def _cmp(self, other: "HeisElement") -> int:
        a = (self.i, self.j, self.k)
        b = (other.i, other.j, other.k)
        return (a > b) - (a < b)


@dataclass(frozen=True, slots=True)
class FibElement(_ElementBase):
    u: int
    v: int
    n: int

    tag: ClassVar[GroupTag] = FIB

    def _mul(self, other: "FibElement") -> "FibElement":
        return fib_mul(self, other)

    def inverse(self) -> "FibElement":
        u, v = _row_times_power(-self.u, -self.v, self.n)
        return FibElement(u, v, -self.n)

    def is_identity(self) -> bool:
        return self.u == 0 and self.v == 0 and self.n == 0

    def is_positive(self) -> bool:
        return fib_positive(self)

    def _cmp(self, other: "FibElement") -> int:
        if self.n != other.n:
            return _sign(self.n - other.n)
        # g^-1 h = (d_h - d_g) B^n, and right-multiplying by B preserves the sign
        return -fib_sign_rho(other.u - self.u, other.v - self.v)


@dataclass(frozen=True, slots=True)
class BSElement(_ElementBase):
    p: int
    e: int
    n: int

    tag: ClassVar[GroupTag] = BS12

    def __post_init__(self) -> None:
        if normalize_dyadic(self.p, self.e) != (self.p, self.e) or self.e < 0:
            raise GroupError(f"dyadic {self.p}/2^{self.e} is not normalized")

    @classmethod
    def make(cls, p: int, e: int, n: int) -> "BSElement":
        p, e = normalize_dyadic(p, e)
        return cls(p, e, n)

    def _mul(self, other: "BSElement") -> "BSElement":
        return bs_mul(self, other)

    def inverse(self) -> "BSElement":
        p, e = _dy_scale(-self.p, self.e, -self.n)
        return BSElement(p, e, -self.n)

    def is_identity(self) -> bool:
        return self.p == 0 and self.n == 0

    def is_positive(self) -> bool:
        return bs_positive(self)

    def _cmp(self, other: "BSElement") -> int:
        if self.n != other.n:
            return _sign(self.n - other.n)
        return _dy_cmp(self.p, self.e, other.p, other.e)

    @property
    def dyadic(self) -> tuple[int, int]:
        return self.p, self.e


Element = Union[ZdElement, HeisElement, FibElement, BSElement]


# ---------------------------------------------------------------------------
# Laws and cones


def heis_mul(g: HeisElement, h: HeisElement) -> HeisElement:
    # b^j a^i' = a^i' b^j c^(-j i')
    return HeisElement(g.i + h.i, g.j + h.j, g.k + h.k - g.j * h.i)


def fib_mul(g: FibElement, h: FibElement) -> FibElement:
    # d1 b^n1 d2 b^n2 = d1 d2^(b^-n1) b^(n1+n2)
    u, v = _row_times_power(h.u, h.v, -g.n)
    return FibElement(g.u + u, g.v + v, g.n + h.n)


def bs_mul(g: BSElement, h: BSElement) -> BSElement:
    p, e = _dy_scale(h.p, h.e, g.n)
    p, e = _dy_add(g.p, g.e, p, e)
    return BSElement(p, e, g.n + h.n)


def heis_positive(g: HeisElement) -> bool:
    if g.i or g.j:
        return (g.i, g.j) > (0, 0)
    return g.k > 0


def fib_positive(g: FibElement) -> bool:
    if g.n:
        return g.n > 0
    return fib_sign_rho(g.u, g.v) == POS


def bs_positive(g: BSElement) -> bool:
    if g.n:
        return g.n > 0
    return g.p > 0


def identity(tag: GroupTag) -> Element:
    if tag.kind == "zd":
        return ZdElement((0,) * tag.dim)
    if tag == HEIS:
        return HeisElement(0, 0, 0)
    if tag == FIB:
        return FibElement(0, 0, 0)
    if tag == BS12:
        return BSElement(0, 0, 0)
    raise GroupError(f"unsupported group {tag}")


def generators(tag: GroupTag) -> dict[str, Element]:
    """Named generators: ``a``, ``b`` (and ``c = [a, b]`` for the Heisenberg group)."""
    if tag.kind == "zd":
        return {
            f"e{i + 1}": ZdElement(tuple(int(i == j) for j in range(tag.dim)))
            for i in range(tag.dim)
        }
    if tag == HEIS:
        return {
            "a": HeisElement(1, 0, 0),
            "b": HeisElement(0, 1, 0),
            "c": HeisElement(0, 0, 1),
        }
    if tag == FIB:
        return {"a": FibElement(1, 0, 0), "b": FibElement(0, 0, 1)}
    if tag == BS12:
        return {"a": BSElement(1, 0, 0), "b": BSElement(0, 0, -1)}
    raise GroupError(f"unsupported group {tag}")


def derived_part_test(g: Element) -> bool:
    """Membership in the derived subgroup (FIB, BS12, HEIS only)."""
    if isinstance(g, (FibElement, BSElement)):
        return g.n == 0
    if isinstance(g, HeisElement):
        return g.i == 0 and g.j == 0
    raise GroupError(f"derived subgroup test unsupported for {g.tag}")


def centralizer_triviality_check(g: Element, samples: Iterable[Element]) -> bool:
    """True iff no sampled nontrivial derived element commutes with ``g``.

    ``g`` must lie outside the derived subgroup of FIB or BS12 and every sample
    must be a nontrivial derived element.
    """
    if not isinstance(g, (FibElement, BSElement)):
        raise GroupError(f"centralizer check unsupported for {g.tag}")
    if derived_part_test(g):
        raise GroupError("g must lie outside the derived subgroup")
    for s in samples:
        _check(g, s)
        if not derived_part_test(s) or s.is_identity():
            raise GroupError(f"sample {format_element(s)} is not a nontrivial derived element")
        if g._mul(s) == s._mul(g):
            return False
    return True


# ---------------------------------------------------------------------------
# Literals


class _Scanner:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, s: str) -> None:
        self.skip()
        if not self.text.startswith(s, self.pos):
            raise ParseError(f"expected {s!r}", self.text, self.pos)
        self.pos += len(s)

    def accept(self, s: str) -> bool:
        self.skip()
        if self.text.startswith(s, self.pos):
            self.pos += len(s)
            return True
        return False

    def integer(self) -> int:
        self.skip()
        start = self.pos
        sign = ""
        if self.pos < len(self.text) and self.text[self.pos] in "+-":
            sign = self.text[self.pos]
            self.pos += 1
            self.skip()
        digits = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits:
            raise ParseError("expected integer", self.text, start)
        return int(sign + self.text[digits:self.pos])

    def end(self) -> None:
        self.skip()
        if self.pos != len(self.text):
            raise ParseError("unexpected trailing input", self.text, self.pos)


def parse_element(tag: GroupTag, text: str) -> Element:
    """Parse an element literal of the given group.

    Grammar: ``(n1,...,nd)`` for zd(d), ``H(i,j,k)``, ``F(u,v;n)`` and
    ``B(p/2^e;n)`` or ``B(p;n)``. Dyadics are normalized on input.
    """
    sc = _Scanner(text)
    if tag.kind == "zd":
        sc.expect("(")
        coords = [sc.integer()]
        for _ in range(tag.dim - 1):
            sc.expect(",")
            coords.append(sc.integer())
        if sc.peek() == ",":
            raise ParseError(f"expected {tag.dim} coordinates", text, sc.pos)
        sc.expect(")")
        sc.end()
        return ZdElement(tuple(coords))
    if tag == HEIS:
        sc.expect("H")
        sc.expect("(")
        i = sc.integer()
        sc.expect(",")
        j = sc.integer()
        sc.expect(",")
        k = sc.integer()
        sc.expect(")")
        sc.end()
        return HeisElement(i, j, k)
    if tag == FIB:
        sc.expect("F")
        sc.expect("(")
        u = sc.integer()
        sc.expect(",")
        v = sc.integer()
        sc.expect(";")
        n = sc.integer()
        sc.expect(")")
        sc.end()
        return FibElement(u, v, n)
    if tag == BS12:
        sc.expect("B")
        sc.expect("(")
        p = sc.integer()
        e = 0
        if sc.accept("/"):
            sc.expect("2")
            sc.expect("^")
            pos = sc.pos
            e = sc.integer()
            if e < 0:
                raise ParseError("dyadic exponent must be non-negative", text, pos)
        sc.expect(";")
        n = sc.integer()
        sc.expect(")")
        sc.end()
        return BSElement.make(p, e, n)
    raise GroupError(f"unsupported group {tag}")


def format_element(g: Element) -> str:
    if isinstance(g, ZdElement):
        return "(" + ",".join(str(x) for x in g.coords) + ")"
    if isinstance(g, HeisElement):
        return f"H({g.i},{g.j},{g.k})"
    if isinstance(g, FibElement):
        return f"F({g.u},{g.v};{g.n})"
    if isinstance(g, BSElement):
        if g.e == 0:
            return f"B({g.p};{g.n})"
        return f"B({g.p}/2^{g.e};{g.n})"
    raise GroupError(f"not an element: {g!r}")
