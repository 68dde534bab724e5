"""Recognize and build the structured sets with |S^2| = 3|S| - 2.

Detectors reconstruct parameters from the sorted set and then check every
claimed relation with exact arithmetic, so a returned witness is always a
certificate. Constructors perform the same checks in the other direction.
"""

from __future__ import annotations

import enum
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

from .core import (
    FiniteSubset,
    commutator,
    commute,
    conjugate,
    pairwise_commuting,
    power,
    square,
)
from .groups import (
    BSElement,
    Element,
    FibElement,
    GroupError,
    HeisElement,
    ZdElement,
    derived_part_test,
    format_element,
    identity,
)

__all__ = [
    "Case",
    "Relation",
    "RelationError",
    "PreconditionError",
    "ProgressionWitness",
    "ClassificationResult",
    "TripleShape",
    "detect_geometric_progression",
    "minimal_covering_progression",
    "relation_doubling",
    "detect_case_i",
    "detect_case_ii",
    "detect_case_iii",
    "classify_small_doubling",
    "construct_case_i",
    "construct_case_ii",
    "construct_case_iii",
    "detect_triple_shape",
    "freiman_isomorphic",
]


class Relation(str, enum.Enum):
    CX_EQ_C2 = "CX_C2"  # c^x = c^2
    C2X_EQ_C = "C2X_C"  # (c^2)^x = c
    NEITHER = "NEITHER"


class RelationError(GroupError):
    """One or more required relations fail; ``violations`` lists them."""

    def __init__(self, violations: Sequence[str]) -> None:
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class PreconditionError(GroupError):
    pass


@dataclass(frozen=True)
class ProgressionWitness:
    x: Element
    c: Element
    k: int

    def elements(self) -> list[Element]:
        out, cur = [], self.x
        for _ in range(self.k):
            out.append(cur)
            cur = cur._mul(self.c)
        return out


def _is_e(g: Element) -> bool:
    return g.is_identity()


def _e_of(g: Element) -> Element:
    return identity(g.tag)


def _ratio(x: Element, y: Element) -> Element:
    return x.inverse()._mul(y)


# ---------------------------------------------------------------------------
# Progressions


def detect_geometric_progression(s: FiniteSubset) -> Optional[ProgressionWitness]:
    if len(s) < 2:
        return None
    x = s[0]
    c = _ratio(x, s[1])
    cur = s[1]
    for g in s.elements[2:]:
        cur = cur._mul(c)
        if cur != g:
            return None
    return ProgressionWitness(x, c, len(s))


def _ext_gcd(values: Sequence[int]) -> tuple[int, list[int]]:
    """gcd(values) >= 0 together with Bezout coefficients."""
    g, coeffs = 0, [0] * len(values)
    for idx, v in enumerate(values):
        # combine g = sum(coeffs * values) with v
        old_r, r = g, v
        old_s, s_ = 1, 0
        old_t, t = 0, 1
        while r:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_s, s_ = s_, old_s - q * s_
            old_t, t = t, old_t - q * t
        coeffs = [old_s * c for c in coeffs]
        coeffs[idx] = old_t
        g = old_r
    if g < 0:
        g, coeffs = -g, [-c for c in coeffs]
    return g, coeffs


def _abelian_coords(ratios: Sequence[Element]) -> Optional[list[tuple[int, ...]]]:
    """Integer coordinates for pairwise commuting elements.

    The coordinates come from a homomorphism that is injective on the
    subgroup generated by ``ratios``.
    """
    first = ratios[0]
    if isinstance(first, ZdElement):
        return [r.coords for r in ratios]
    if isinstance(first, HeisElement):
        lead = next(((r.i, r.j) for r in ratios if r.i or r.j), None)
        if lead is None:
            return [(r.k,) for r in ratios]
        g = math.gcd(*lead)
        p, q = lead[0] // g, lead[1] // g
        out = []
        for r in ratios:
            if r.i * q != r.j * p:
                return None
            t = r.i // p if p else r.j // q
            # r = (p, q, 0)^t * (0, 0, k + pq t(t-1)/2)
            out.append((t, r.k + p * q * t * (t - 1) // 2))
        return out
    if isinstance(first, (FibElement, BSElement)):
        if any(r.n for r in ratios):
            # the derived subgroup meets such a subgroup trivially
            return [(r.n,) for r in ratios]
        if isinstance(first, FibElement):
            return [(r.u, r.v) for r in ratios]
        top = max(r.e for r in ratios)
        return [(r.p << (top - r.e),) for r in ratios]
    raise GroupError(f"unsupported group {first.tag}")


def minimal_covering_progression(s: FiniteSubset) -> Optional[ProgressionWitness]:
    """Shortest progression ``{x, xc, ..., xc^u}`` containing a commuting set.

    Returns ``None`` when the ratios ``min(S)^-1 s`` do not generate a cyclic
    group, in which case no single progression covers ``S``.
    """
    if len(s) < 2:
        return None
    if not pairwise_commuting(s):
        raise PreconditionError("covering progressions need a pairwise commuting set")
    x = s.min
    ratios = [_ratio(x, g) for g in s.elements[1:]]
    coords = _abelian_coords(ratios)
    if coords is None:
        return None
    lead = coords[0]
    h = math.gcd(*lead)
    prim = tuple(v // h for v in lead)
    norm = sum(v * v for v in prim)
    ts = []
    for vec in coords:
        dot = sum(a * b for a, b in zip(vec, prim))
        t, rem = divmod(dot, norm)
        if rem or tuple(t * v for v in prim) != tuple(vec):
            return None
        ts.append(t)
    d, lam = _ext_gcd(ts)
    gen = _e_of(x)
    for r, l in zip(ratios, lam):
        if l:
            gen = gen._mul(power(r, l))
    exps = [t // d for t in ts]
    if gen.inverse()._cmp(gen) > 0:
        gen = gen.inverse()
        exps = [-e for e in exps]
    for g, e in zip(s.elements[1:], exps):
        if e < 0 or x._mul(power(gen, e)) != g:
            return None
    return ProgressionWitness(x, gen, max(exps) + 1)


# ---------------------------------------------------------------------------
# Relations


def relation_doubling(c: Element, x: Element) -> Relation:
    c2 = c._mul(c)
    if conjugate(c, x) == c2:
        return Relation.CX_EQ_C2
    if conjugate(c2, x) == c:
        return Relation.C2X_EQ_C
    return Relation.NEITHER


def _fib_like_relation(c: Element, x: Element) -> bool:
    """``c^{x^2} = c c^x = c^x c``."""
    cx = conjugate(c, x)
    cxx = conjugate(cx, x)
    return cxx == c._mul(cx) == cx._mul(c)


# ---------------------------------------------------------------------------
# Results


class Case(str, enum.Enum):
    ABELIAN = "ABELIAN"
    CASE_I = "CASE_I"
    CASE_II = "CASE_II"
    CASE_III_A = "CASE_III_A"
    CASE_III_B = "CASE_III_B"
    CASE_III_C = "CASE_III_C"
    CASE_III_D = "CASE_III_D"
    UNCLASSIFIED = "UNCLASSIFIED"


@dataclass(frozen=True)
class ClassificationResult:
    case: Case
    params: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"case": self.case.value}
        for key, val in self.params.items():
            if isinstance(val, enum.Enum):
                out[key] = val.value
            elif isinstance(val, (int, str)):
                out[key] = val
            else:
                out[key] = format_element(val)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    def rebuild(self) -> FiniteSubset:
        """Regenerate the set from the witnesses through the matching constructor."""
        p = self.params
        if self.case is Case.CASE_I:
            return construct_case_i(p["a"], p["b"], p["c"], p["i"], p["j"], p["orientation"])
        if self.case is Case.CASE_II:
            return construct_case_ii(p["x"], p["c"], p["k"])
        if self.case is Case.CASE_III_A:
            return construct_case_iii("a", x=p["x"], c=p["c"], variant=p["variant"])
        if self.case is Case.CASE_III_B:
            return construct_case_iii("b", c=p["c"], x=p["x"])
        if self.case is Case.CASE_III_C:
            return construct_case_iii("c", x=p["x"], c=p["c"], y=p["y"], orientation=p["orientation"])
        if self.case is Case.CASE_III_D:
            return construct_case_iii("d", x=p["x"], c=p["c"], y=p["y"], orientation=p["orientation"])
        raise GroupError(f"{self.case.value} carries no constructor witnesses")


# ---------------------------------------------------------------------------
# Case (i): two progressions with a common central-ish ratio


def _chains(elements: Sequence[Element], c: Element) -> list[list[Element]]:
    """Split a sorted set into maximal runs ``h, hc, hc^2, ...``."""
    members = set(elements)
    heads = [g for g in elements if g._mul(c.inverse()) not in members]
    out = []
    for h in heads:
        run, cur = [], h
        while cur in members:
            run.append(cur)
            cur = cur._mul(c)
        out.append(run)
    return out


def detect_case_i(s: FiniteSubset) -> Optional[ClassificationResult]:
    if len(s) < 4:
        return None
    seen = set()
    elems = s.elements
    candidates = sorted({_ratio(x, y) for x, y in itertools.combinations(elems, 2)})
    for c in candidates:
        if c in seen:
            continue
        seen.add(c)
        runs = _chains(elems, c)
        if len(runs) != 2:
            continue
        (a, *_), (b, *_) = runs
        i, j = len(runs[0]) - 1, len(runs[1]) - 1
        if not (commute(a, c) and commute(b, c)):
            continue
        ab, ba = a._mul(b), b._mul(a)
        if ab == ba._mul(c):
            return ClassificationResult(
                Case.CASE_I, {"a": a, "b": b, "c": c, "i": i, "j": j, "orientation": "AB_BAC"}
            )
        if ba == ab._mul(c):
            # rename so that the relation reads ab = bac
            return ClassificationResult(
                Case.CASE_I, {"a": b, "b": a, "c": c, "i": j, "j": i, "orientation": "AB_BAC"}
            )
    return None


def detect_case_ii(s: FiniteSubset) -> Optional[ClassificationResult]:
    w = detect_geometric_progression(s)
    if w is None:
        return None
    rel = relation_doubling(w.c, w.x)
    if rel is Relation.NEITHER:
        return None
    return ClassificationResult(
        Case.CASE_II, {"x": w.x, "c": w.c, "k": w.k, "orientation": rel}
    )


# ---------------------------------------------------------------------------
# Case (iii): four-element exceptional shapes


def _case_iii_a(s: FiniteSubset) -> Optional[ClassificationResult]:
    h = s.min
    target = set(s.elements)
    for variant in ("X", "X_INV"):
        x = h if variant == "X" else h.inverse()
        for s1 in s.elements[1:]:
            c = _ratio(h, s1)
            if not _fib_like_relation(c, x):
                continue
            cx = conjugate(c, x)
            cxx = conjugate(cx, x)
            if {h, s1, h._mul(cx), h._mul(cxx)} == target:
                return ClassificationResult(Case.CASE_III_A, {"x": x, "c": c, "variant": variant})
    return None


def _case_iii_b(s: FiniteSubset) -> Optional[ClassificationResult]:
    e = _e_of(s.min)
    if e not in s:
        return None
    for x in s:
        if x == e:
            continue
        p, q = [g for g in s if g != x and g != e]
        for c, c2 in ((p, q), (q, p)):
            if c._mul(c) != c2:
                continue
            rel = relation_doubling(c, x)
            if rel is not Relation.NEITHER:
                return ClassificationResult(Case.CASE_III_B, {"c": c, "x": x, "orientation": rel})
    return None


def _three_term_params(rest: Sequence[Element]) -> list[tuple[Element, Element]]:
    """Parametrizations ``(x, c)`` of a sorted triple as ``{x, xc, xc^2}``."""
    r0, r1, r2 = rest
    out = []
    c = _ratio(r0, r1)
    if r1._mul(c) == r2:
        out.append((r0, c))
    c = _ratio(r2, r1)
    if r1._mul(c) == r0:
        out.append((r2, c))
    return out


def _split_y(s: FiniteSubset):
    for y in s:
        rest = [g for g in s if g != y]
        for x, c in _three_term_params(rest):
            yield x, c, y


def _case_iii_c_orientation(x: Element, c: Element, y: Element) -> Optional[str]:
    if not commute(c, x):
        return None
    c2 = c._mul(c)
    if commutator(x, y) == c and conjugate(c2, y) == c:
        return "XY_C"
    if commutator(y, x) == c2 and conjugate(c, y) == c2:
        return "YX_C2"
    return None


def _case_iii_d_orientation(x: Element, c: Element, y: Element) -> Optional[Relation]:
    if not (commute(c, x) and commute(x, y)):
        return None
    rel = relation_doubling(c, y)
    return None if rel is Relation.NEITHER else rel


def _case_iii_c(s: FiniteSubset) -> Optional[ClassificationResult]:
    for x, c, y in _split_y(s):
        o = _case_iii_c_orientation(x, c, y)
        if o is not None:
            return ClassificationResult(Case.CASE_III_C, {"x": x, "c": c, "y": y, "orientation": o})
    return None


def _case_iii_d(s: FiniteSubset) -> Optional[ClassificationResult]:
    for x, c, y in _split_y(s):
        o = _case_iii_d_orientation(x, c, y)
        if o is not None:
            return ClassificationResult(Case.CASE_III_D, {"x": x, "c": c, "y": y, "orientation": o})
    return None


def detect_case_iii(s: FiniteSubset) -> Optional[ClassificationResult]:
    if len(s) != 4:
        return None
    for detector in (_case_iii_a, _case_iii_b, _case_iii_c, _case_iii_d):
        res = detector(s)
        if res is not None:
            return res
    return None


def classify_small_doubling(s: FiniteSubset) -> ClassificationResult:
    k = len(s)
    if k < 4:
        raise PreconditionError(f"need |S| >= 4, got {k}")
    sq = len(square(s))
    if sq != 3 * k - 2:
        raise PreconditionError(f"need |S^2| = 3|S|-2 = {3 * k - 2}, got {sq}")
    if pairwise_commuting(s):
        return ClassificationResult(Case.ABELIAN)
    for detector in (detect_case_i, detect_case_ii, detect_case_iii):
        res = detector(s)
        if res is not None:
            return res
    return ClassificationResult(Case.UNCLASSIFIED)


# ---------------------------------------------------------------------------
# Constructors


def _distinct(elements: list[Element], violations: list[str]) -> None:
    if len(set(elements)) != len(elements):
        violations.append("elements are not pairwise distinct")


def _raise(violations: list[str]) -> None:
    if violations:
        raise RelationError(violations)


def construct_case_i(
    a: Element, b: Element, c: Element, i: int, j: int, orientation: str = "AB_BAC"
) -> FiniteSubset:
    """``{a, ac, ..., ac^i, b, bc, ..., bc^j}``."""
    violations: list[str] = []
    if i < 0 or j < 0:
        violations.append("run lengths must be non-negative")
    if _is_e(c) or not c.is_positive():
        violations.append("c must be greater than the identity")
    if not commute(a, c):
        violations.append("[a,c] != 1")
    if not commute(b, c):
        violations.append("[b,c] != 1")
    ab, ba = a._mul(b), b._mul(a)
    if orientation == "AB_BAC":
        if ab != ba._mul(c):
            violations.append("ab != bac")
    elif orientation == "BA_ABC":
        if ba != ab._mul(c):
            violations.append("ba != abc")
    else:
        violations.append(f"unknown orientation {orientation!r}")
    _raise(violations)
    elems = [a._mul(power(c, t)) for t in range(i + 1)] + [b._mul(power(c, t)) for t in range(j + 1)]
    _distinct(elems, violations)
    _raise(violations)
    return FiniteSubset.of(elems)


def construct_case_ii(x: Element, c: Element, k: int) -> FiniteSubset:
    """``{x, xc, ..., xc^(k-1)}`` with c^x = c^2 or (c^2)^x = c."""
    violations: list[str] = []
    if k < 3:
        violations.append("k must be at least 3")
    if _is_e(c) or not c.is_positive():
        violations.append("c must be greater than the identity")
    if relation_doubling(c, x) is Relation.NEITHER:
        violations.append("neither c^x = c^2 nor (c^2)^x = c")
    _raise(violations)
    return FiniteSubset.of(ProgressionWitness(x, c, k).elements())


def construct_case_iii(subcase: str, **params: Any) -> FiniteSubset:
    """Four-element sets of subcases ``a``-``d``.

    ``a``: x, c, variant (``X`` or ``X_INV``); ``b``: c, x;
    ``c``: x, c, y, orientation (``XY_C`` or ``YX_C2``);
    ``d``: x, c, y, orientation (``CX_C2`` or ``C2X_C``, read with y in place of x).
    Only ``a`` and ``b`` come with |S^2| = 10 guarantees.
    """
    violations: list[str] = []
    if subcase == "a":
        x, c = params["x"], params["c"]
        form = params.get("variant", "X")
        if _is_e(c) or not c.is_positive():
            violations.append("c must be greater than the identity")
        cx = conjugate(c, x)
        cxx = conjugate(cx, x)
        if cxx != c._mul(cx):
            violations.append("c^(x^2) != c c^x")
        if c._mul(cx) != cx._mul(c):
            violations.append("c c^x != c^x c")
        if form not in ("X", "X_INV"):
            violations.append(f"unknown variant {form!r}")
        _raise(violations)
        h = x if form == "X" else x.inverse()
        elems = [h, h._mul(c), h._mul(cx), h._mul(cxx)]
    elif subcase == "b":
        c, x = params["c"], params["x"]
        if _is_e(c):
            violations.append("c must not be the identity")
        if relation_doubling(c, x) is Relation.NEITHER:
            violations.append("neither c^x = c^2 nor (c^2)^x = c")
        _raise(violations)
        elems = [_e_of(c), c, c._mul(c), x]
    elif subcase in ("c", "d"):
        x, c, y = params["x"], params["c"], params["y"]
        orientation = params.get("orientation")
        if _is_e(c):
            violations.append("c must not be the identity")
        if subcase == "c":
            got = _case_iii_c_orientation(x, c, y)
            if got is None or (orientation is not None and got != orientation):
                violations.append("relations [c,x] = 1 and [x,y] = c = (c^2)^y (or [y,x] = c^2 = c^y) fail")
        else:
            got = _case_iii_d_orientation(x, c, y)
            if got is None or (orientation is not None and got is not Relation(orientation)):
                violations.append("relations [c,x] = [x,y] = 1 and c^y = c^2 (or (c^2)^y = c) fail")
        _raise(violations)
        elems = [x, x._mul(c), x._mul(c)._mul(c), y]
    else:
        raise GroupError(f"unknown case (iii) subcase {subcase!r}")
    _distinct(elems, violations)
    _raise(violations)
    return FiniteSubset.of(elems)


# ---------------------------------------------------------------------------
# Triples


@dataclass(frozen=True)
class TripleShape:
    shape: str  # PROP4_I, PROP4_II, PROP4_III, PROP3_CENTER, PROP3_AAB, NONE
    params: dict[str, Any] = field(default_factory=dict)


def _in_derived(c: Element) -> bool:
    try:
        return derived_part_test(c)
    except GroupError:
        return True


def detect_triple_shape(s: FiniteSubset) -> TripleShape:
    """Which three-element shape a set with |S^2| = 7 realizes.

    When an adjacent pair commutes only the shapes "one element commutes with
    the other two" and ``{a, a^b, b}`` are considered; otherwise the
    progression-like shapes built from ``x`` (or ``x^-1``) and ``c``.
    """
    if len(s) != 3:
        raise PreconditionError("triple shapes need exactly three elements")
    x1, x2, x3 = s.elements
    if pairwise_commuting(s):
        return TripleShape("NONE")
    if commute(x1, x2) or commute(x2, x3):
        for g in s:
            others = [h for h in s if h != g]
            if all(commute(g, h) for h in others):
                return TripleShape("PROP3_CENTER", {"z": g})
        for b in s:
            p, q = [h for h in s if h != b]
            if not commute(p, q):
                continue
            for a, ab in ((p, q), (q, p)):
                if conjugate(a, b) == ab:
                    return TripleShape("PROP3_AAB", {"a": a, "b": b})
        return TripleShape("NONE")
    target = set(s.elements)
    for form in ("X", "X_INV"):
        x = x1 if form == "X" else x1.inverse()
        for s1 in (x2, x3):
            c = _ratio(x1, s1)
            if not (_in_derived(c) and _fib_like_relation(c, x)):
                continue
            cx = conjugate(c, x)
            if {x1, s1, x1._mul(cx)} == target:
                return TripleShape("PROP4_I", {"x": x, "c": c, "variant": form})
            if {x1, s1, x1._mul(c)._mul(cx)} == target:
                return TripleShape("PROP4_II", {"x": x, "c": c, "variant": form})
    w = detect_geometric_progression(s)
    if w is not None:
        rel = relation_doubling(w.c, w.x)
        if rel is not Relation.NEITHER:
            return TripleShape("PROP4_III", {"x": w.x, "c": w.c, "orientation": rel})
    return TripleShape("NONE")


# ---------------------------------------------------------------------------
# Freiman isomorphism in Z^d


def _pair_pattern(vectors: Sequence[tuple[int, ...]], order: Sequence[int]) -> tuple[int, ...]:
    """Label unordered pairs (with repetition) by equal-sum class, first-seen numbering."""
    labels: dict[tuple[int, ...], int] = {}
    out = []
    n = len(order)
    for p in range(n):
        for q in range(p, n):
            a, b = vectors[order[p]], vectors[order[q]]
            key = tuple(x + y for x, y in zip(a, b))
            out.append(labels.setdefault(key, len(labels)))
    return tuple(out)


def freiman_isomorphic(a: FiniteSubset | Iterable[ZdElement], b: FiniteSubset | Iterable[ZdElement]) -> bool:
    """Exhaustive search for a bijection preserving every relation x1+x2 = x3+x4."""
    a, b = list(a), list(b)
    if not all(isinstance(g, ZdElement) for g in a + b):
        raise GroupError("Freiman isomorphism is only decided for subsets of Z^d")
    av = [g.coords for g in a]
    bv = [g.coords for g in b]
    if len(av) != len(bv):
        raise PreconditionError("sets of different sizes are never Freiman isomorphic")
    if len(av) > 8:
        raise PreconditionError("exhaustive Freiman test is limited to 8 elements")
    target = _pair_pattern(av, range(len(av)))
    if len(set(target)) != len(set(_pair_pattern(bv, range(len(bv))))):
        return False
    return any(
        _pair_pattern(bv, perm) == target for perm in itertools.permutations(range(len(bv)))
    )
