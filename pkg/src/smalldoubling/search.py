"""Exhaustive verification of small doubling theorems on bounded balls.

A ball is a coordinate box in normal form. Every task enumerates subsets of
a ball (optionally only those containing a generation certificate), counts
``|S^2|`` through a precomputed product table and the compiled scanner, and
checks the theorem's conclusion on the subsets that meet its hypothesis.
An empty findings list means the statement holds on that ball.
"""

from __future__ import annotations

import csv
import enum
import io
import itertools
import json
import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Callable, Iterable, Iterator, Optional, Sequence

import numpy as np

from . import kernels
from .classify import (
    Case,
    RelationError,
    classify_small_doubling,
    construct_case_i,
    construct_case_ii,
    construct_case_iii,
    detect_case_ii,
    detect_triple_shape,
    minimal_covering_progression,
)
from .core import FiniteSubset, conjugate, pairwise_commuting, power, square
from .groups import (
    BS12,
    FIB,
    HEIS,
    BSElement,
    Element,
    FibElement,
    GroupError,
    GroupTag,
    HeisElement,
    ZdElement,
    derived_part_test,
    format_element,
    generators,
    identity,
    normalize_dyadic,
)

log = logging.getLogger(__name__)

__all__ = [
    "Kind",
    "BallSpec",
    "VerificationTask",
    "Finding",
    "VerificationSummary",
    "enumerate_ball",
    "subsets",
    "default_certificate",
    "run_task",
    "run_tasks",
    "verify_theorem_C",
    "verify_theorem_D",
    "verify_theorem_1",
    "verify_lemma_extension",
    "verify_prop11_certificate",
    "verify_triple_props",
    "verify_converses",
    "summary_csv",
    "CSV_HEADER",
]


class Kind(str, enum.Enum):
    THEOREM_C = "THEOREM_C"
    THEOREM_D = "THEOREM_D"
    THEOREM_1 = "THEOREM_1"
    LEMMA_EXT = "LEMMA_EXT"
    PROP11_CERT = "PROP11_CERT"
    TRIPLE_PROPS = "TRIPLE_PROPS"
    CONVERSES = "CONVERSES"
    # negative control: claims |S^2| <= alpha*k + beta for every subset
    UPPER_BOUND = "UPPER_BOUND"


@dataclass(frozen=True)
class BallSpec:
    """Coordinate box.

    ``zd(d)``: ``bounds = (lo, hi)`` for every coordinate. ``heis``: ``(ri, rj, rk)``.
    ``fib``: ``(ru, rv, rn)``. ``bs12``: ``(rp, re, rn)`` for numerators
    ``|p| <= rp``, exponents ``0 <= e <= re`` and ``|n| <= rn``.
    """

    tag: GroupTag
    bounds: tuple[int, ...]

    @classmethod
    def parse(cls, tag: GroupTag, text: str) -> "BallSpec":
        text = text.strip()
        try:
            if tag.kind == "zd":
                if ".." in text:
                    lo, hi = (int(t) for t in text.split(".."))
                else:
                    r = int(text)
                    lo, hi = -r, r
                if lo > hi:
                    raise GroupError(f"empty window {text!r}")
                return cls(tag, (lo, hi))
            vals = tuple(int(t) for t in text.split(","))
        except ValueError:
            raise GroupError(f"bad ball bounds {text!r}") from None
        if any(v < 0 for v in vals):
            raise GroupError(f"ball bounds must be non-negative: {text!r}")
        if tag in (HEIS, FIB) and len(vals) == 2:
            vals = (vals[0], vals[0], vals[1])
        if len(vals) != 3:
            raise GroupError(f"{tag} balls take three bounds, got {text!r}")
        return cls(tag, vals)

    def __str__(self) -> str:
        if self.tag.kind == "zd":
            return f"{self.bounds[0]}..{self.bounds[1]}"
        return ",".join(str(b) for b in self.bounds)


def enumerate_ball(spec: BallSpec) -> FiniteSubset:
    tag, bd = spec.tag, spec.bounds
    if tag.kind == "zd":
        lo, hi = bd
        elems: Iterable[Element] = (
            ZdElement(c) for c in itertools.product(range(lo, hi + 1), repeat=tag.dim)
        )
    elif tag == HEIS:
        ri, rj, rk = bd
        elems = (
            HeisElement(i, j, k)
            for i in range(-ri, ri + 1)
            for j in range(-rj, rj + 1)
            for k in range(-rk, rk + 1)
        )
    elif tag == FIB:
        ru, rv, rn = bd
        elems = (
            FibElement(u, v, n)
            for u in range(-ru, ru + 1)
            for v in range(-rv, rv + 1)
            for n in range(-rn, rn + 1)
        )
    elif tag == BS12:
        rp, re, rn = bd
        dyadics = {normalize_dyadic(p, e) for p in range(-rp, rp + 1) for e in range(re + 1)}
        elems = (BSElement(p, e, n) for p, e in dyadics for n in range(-rn, rn + 1))
    else:
        raise GroupError(f"unsupported group {tag}")
    return FiniteSubset.of(elems)


def subsets(
    universe: FiniteSubset, k: int, certificate: Optional[FiniteSubset] = None
) -> Iterator[FiniteSubset]:
    """All k-subsets in lexicographic index order, optionally only those containing ``certificate``."""
    if k > len(universe):
        raise GroupError(f"k = {k} exceeds universe size {len(universe)}")
    elems = universe.elements
    if certificate is None:
        for combo in itertools.combinations(range(len(elems)), k):
            yield FiniteSubset(universe.tag, tuple(elems[i] for i in combo))
        return
    if any(g not in universe for g in certificate):
        raise GroupError("certificate is not contained in the universe")
    fixed = [elems.index(g) for g in certificate]
    free = [i for i in range(len(elems)) if i not in fixed]
    for combo in itertools.combinations(free, k - len(fixed)):
        idx = sorted(fixed + list(combo))
        yield FiniteSubset(universe.tag, tuple(elems[i] for i in idx))


def default_certificate(tag: GroupTag) -> tuple[Element, ...]:
    """``{b, ba}``: generates the whole group for FIB and BS12."""
    if tag not in (FIB, BS12):
        raise GroupError(f"no generation certificate for {tag}")
    gens = generators(tag)
    a, b = gens["a"], gens["b"]
    return (b, b._mul(a))


# ---------------------------------------------------------------------------
# Records


@dataclass(frozen=True)
class VerificationTask:
    kind: Kind
    tag: GroupTag
    ball: Optional[BallSpec] = None
    k: int = 3
    certificate: Optional[tuple[Element, ...]] = None
    triple: Optional[tuple[Element, ...]] = None
    expect: tuple[str, ...] = ()
    alpha: int = 3
    beta: int = -3

    def describe_ball(self) -> str:
        return str(self.ball) if self.ball is not None else ""


@dataclass(frozen=True)
class Finding:
    task: str
    group: str
    ball: str
    k: int
    subset: tuple[str, ...]
    square_size: int
    expected: str
    outcome: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "task": self.task,
                "group": self.group,
                "ball": self.ball,
                "k": self.k,
                "subset": list(self.subset),
                "square_size": self.square_size,
                "expected": self.expected,
                "outcome": self.outcome,
            }
        )


@dataclass
class VerificationSummary:
    task: VerificationTask
    subsets_examined: int = 0
    findings: list[Finding] = field(default_factory=list)
    seconds: float = 0.0
    outcomes: Counter = field(default_factory=Counter)
    error: Optional[str] = None

    @property
    def verified(self) -> bool:
        return self.error is None and not self.findings


CSV_HEADER = "task,group,ball,k,subsets_examined,findings,seconds"


def summary_csv(summaries: Sequence[VerificationSummary], timing: bool = False) -> str:
    """CSV report. Wall time is written only when ``timing`` is set, keeping output reproducible."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER.split(","))
    for s in summaries:
        t = s.task
        group = "" if t.kind is Kind.CONVERSES else str(t.tag)
        w.writerow([
            t.kind.value,
            group,
            t.describe_ball(),
            t.k,
            s.subsets_examined,
            "error" if s.error else len(s.findings),
            f"{s.seconds:.3f}" if timing else "0",
        ])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Scanning machinery


@dataclass(frozen=True)
class _Context:
    universe: FiniteSubset
    table: np.ndarray
    n_ids: int
    fixed: np.ndarray
    free: np.ndarray
    kfree: int

    @property
    def total(self) -> int:
        if self.kfree < 0 or self.kfree > len(self.free):
            return 0
        return comb(len(self.free), self.kfree)


def product_table(universe: FiniteSubset) -> tuple[np.ndarray, int]:
    """``table[i, j]`` is a dense id of ``universe[i] * universe[j]``."""
    elems = universe.elements
    ids: dict[Element, int] = {}
    n = len(elems)
    table = np.empty((n, n), dtype=np.int32)
    for i, x in enumerate(elems):
        for j, y in enumerate(elems):
            table[i, j] = ids.setdefault(x._mul(y), len(ids))
    return table, len(ids)


@lru_cache(maxsize=32)
def _universe_table(ball: BallSpec) -> tuple[FiniteSubset, np.ndarray, int]:
    universe = enumerate_ball(ball)
    table, n_ids = product_table(universe)
    return universe, table, n_ids


@lru_cache(maxsize=64)
def _context(ball: BallSpec, k: int, certificate: Optional[tuple[Element, ...]]) -> _Context:
    universe, table, n_ids = _universe_table(ball)
    cert = certificate or ()
    fixed = []
    for g in cert:
        if g not in universe:
            # certificate outside the ball: nothing to examine
            return _Context(universe, table, n_ids, np.zeros(0, np.int64), np.zeros(0, np.int64), -1)
        fixed.append(universe.elements.index(g))
    fixed = sorted(set(fixed))
    free = [i for i in range(len(universe)) if i not in set(fixed)]
    return _Context(
        universe,
        table,
        n_ids,
        np.asarray(fixed, dtype=np.int64),
        np.asarray(free, dtype=np.int64),
        k - len(fixed),
    )


def _scan(ctx: _Context, start: int, count: int, lo: int, hi: int):
    if ctx.kfree < 0 or count <= 0:
        return 0, []
    return kernels.scan_subsets(
        ctx.table, ctx.n_ids, ctx.fixed, ctx.free, ctx.kfree, start, count, lo, hi
    )


def _window(task: VerificationTask) -> tuple[int, int]:
    """Square-size window of subsets on which the theorem has something to check."""
    k = task.k
    if task.kind is Kind.THEOREM_C:
        return 0, 3 * k - 4
    if task.kind is Kind.THEOREM_D:
        return 0, 3 * k - 3
    if task.kind is Kind.THEOREM_1:
        return 3 * k - 2, 3 * k - 2
    if task.kind is Kind.TRIPLE_PROPS:
        return 7, 7
    if task.kind is Kind.PROP11_CERT:
        return (0, 13) if task.tag == FIB else (13, 13)
    if task.kind is Kind.UPPER_BOUND:
        return task.alpha * k + task.beta + 1, k * k
    raise GroupError(f"{task.kind.value} is not a subset scan")


def _finding(task: VerificationTask, s: FiniteSubset, size: int, expected: str, outcome: str) -> Finding:
    return Finding(
        task=task.kind.value,
        group=str(task.tag),
        ball=task.describe_ball(),
        k=task.k,
        subset=tuple(s.literals()),
        square_size=size,
        expected=expected,
        outcome=outcome,
    )


def _check_hit(task: VerificationTask, s: FiniteSubset, size: int, outcomes: Counter) -> Optional[Finding]:
    kind, k = task.kind, task.k
    if kind is Kind.THEOREM_D:
        if not pairwise_commuting(s):
            return _finding(task, s, size, "|S^2| <= 3k-3 implies <S> abelian", "NON_COMMUTING")
        outcomes["commuting"] += 1
        return None
    if kind is Kind.THEOREM_C:
        expected = "|S^2| <= 3k-4 implies <S> abelian and S in a progression of size |S^2|-|S|+1"
        if not pairwise_commuting(s):
            return _finding(task, s, size, expected, "NON_COMMUTING")
        w = minimal_covering_progression(s)
        if w is None:
            return _finding(task, s, size, expected, "NO_PROGRESSION")
        if w.k > size - k + 1:
            return _finding(task, s, size, expected, f"PROGRESSION_TOO_LONG:{w.k}")
        outcomes[f"progression_length_{w.k}"] += 1
        return None
    if kind is Kind.THEOREM_1:
        if pairwise_commuting(s):
            outcomes[Case.ABELIAN.value] += 1
            return None
        res = classify_small_doubling(s)
        outcomes[res.case.value] += 1
        if res.case is Case.UNCLASSIFIED:
            return _finding(task, s, size, "one of cases (i), (ii), (iii)", res.case.value)
        if task.expect and res.case.value not in task.expect:
            return _finding(task, s, size, "case in " + "|".join(task.expect), res.case.value)
        return None
    if kind is Kind.TRIPLE_PROPS:
        if pairwise_commuting(s):
            return None
        shape = detect_triple_shape(s)
        outcomes[shape.shape] += 1
        if shape.shape == "NONE":
            return _finding(task, s, size, "a three-element shape", "NONE")
        if task.tag in (FIB, BS12):
            meet = [g for g in s if derived_part_test(g)]
            e = identity(task.tag)
            if not (all(g == e for g in meet) or len(meet) == 2):
                return _finding(
                    task, s, size, "S meets G' in a subset of {1} or in 2 elements", f"MEETS_DERIVED_{len(meet)}"
                )
        return None
    if kind is Kind.PROP11_CERT:
        if task.tag == FIB:
            return _finding(task, s, size, "|S^2| >= 14", f"SQUARE_{size}")
        res = detect_case_ii(s)
        if res is None:
            return _finding(task, s, size, "geometric progression with c^x = c^2 or (c^2)^x = c", "NOT_PROGRESSION")
        outcomes[f"CASE_II_k{res.params['k']}"] += 1
        return None
    if kind is Kind.UPPER_BOUND:
        return _finding(task, s, size, f"|S^2| <= {task.alpha}k{task.beta:+d}", f"SQUARE_{size}")
    raise GroupError(f"unexpected kind {kind}")


def _evaluate_chunk(args: tuple[VerificationTask, int, int]) -> tuple[int, list[Finding], Counter]:
    task, start, count = args
    ctx = _context(task.ball, task.k, task.certificate)
    lo, hi = _window(task)
    examined, hits = _scan(ctx, start, count, lo, hi)
    elems = ctx.universe.elements
    findings: list[Finding] = []
    outcomes: Counter = Counter()
    for idx, size in hits:
        outcomes["hits"] += 1
        s = FiniteSubset(ctx.universe.tag, tuple(elems[i] for i in idx))
        f = _check_hit(task, s, size, outcomes)
        if f is not None:
            findings.append(f)
    return examined, findings, outcomes


def _chunks(total: int, workers: int) -> list[tuple[int, int]]:
    n = 1 if workers <= 1 else min(total, workers * 4)
    n = max(n, 1)
    step, extra = divmod(total, n)
    out, pos = [], 0
    for i in range(n):
        size = step + (1 if i < extra else 0)
        if size:
            out.append((pos, size))
        pos += size
    return out


# ---------------------------------------------------------------------------
# Non-scan tasks


def _lemma_shape(triple: Sequence[Element]) -> tuple[Element, Element, bool, int]:
    """Recover ``(t, c, inverted, power)`` for ``{t^±1, t^±1 c, t^±1 c^(t^power)}``."""
    s = FiniteSubset.of(triple)
    if len(s) != 3 or s.tag != FIB:
        raise RelationError(["the lemma sweep needs three distinct FIB elements"])
    for h, m, top in itertools.permutations(s.elements):
        c = h.inverse()._mul(m)
        for inverted in (False, True):
            t = h.inverse() if inverted else h
            ct = conjugate(c, t)
            ctt = conjugate(ct, t)
            if not (ctt == c._mul(ct) == ct._mul(c)):
                continue
            for pw, cp in ((1, ct), (2, ctt)):
                if h._mul(cp) == top:
                    return t, c, inverted, pw
    raise RelationError(
        ["T is not {t, tc, tc^t}, {t, tc, tc^(t^2)} or their t^-1 forms with c^(t^2) = c c^t = c^t c"]
    )


def verify_lemma_extension(
    triple: Sequence[Element], ball: BallSpec, on_finding: Optional[Callable[[Finding], None]] = None
) -> VerificationSummary:
    task = VerificationTask(Kind.LEMMA_EXT, FIB, ball, 4, triple=tuple(triple))
    summary = VerificationSummary(task)
    t0 = time.perf_counter()
    t, c, inverted, pw = _lemma_shape(triple)
    base = FiniteSubset.of(triple)
    head = t.inverse() if inverted else t
    special = head._mul(conjugate(c, power(t, 2)))
    unique_ten = pw == 1
    for x4 in enumerate_ball(ball):
        if not x4 > base.max:
            continue
        summary.subsets_examined += 1
        s = FiniteSubset.of(base.elements + (x4,))
        size = len(square(s))
        if size == 10:
            summary.outcomes["ten"] += 1
        f = None
        if unique_ten:
            expected = "|S^2| = 10 iff x4 = t c^(t^2)"
            if (size == 10) != (x4 == special):
                f = _finding(task, s, size, expected, f"SQUARE_{size}")
        elif size <= 10:
            f = _finding(task, s, size, "|S^2| > 10", f"SQUARE_{size}")
        if f is not None:
            summary.findings.append(f)
            if on_finding:
                on_finding(f)
    summary.seconds = time.perf_counter() - t0
    return summary


def verify_converses(on_finding: Optional[Callable[[Finding], None]] = None) -> VerificationSummary:
    """Sets built by the case (i), (ii) and (iii)(a)/(b) constructors have |S^2| = 3|S| - 2."""
    task = VerificationTask(Kind.CONVERSES, HEIS, None, 0)
    summary = VerificationSummary(task)
    t0 = time.perf_counter()
    h = generators(HEIS)
    fg = generators(FIB)
    bg = generators(BS12)
    built: list[tuple[str, FiniteSubset]] = []
    for i in range(6):
        for j in range(6):
            built.append((f"case_i:{i},{j}", construct_case_i(h["a"], h["b"], h["c"], i, j, "AB_BAC")))
            built.append(
                (f"case_i_ba:{i},{j}", construct_case_i(h["b"], h["a"], h["c"], i, j, "BA_ABC"))
            )
    for k in range(3, 11):
        built.append((f"case_ii:{k}", construct_case_ii(bg["b"], bg["a"], k)))
        built.append((f"case_ii_inv:{k}", construct_case_ii(bg["b"].inverse(), bg["a"], k)))
    built.append(("case_iii_a", construct_case_iii("a", x=fg["b"], c=fg["a"], variant="X")))
    built.append(("case_iii_a_inv", construct_case_iii("a", x=fg["b"], c=fg["a"], variant="X_INV")))
    built.append(("case_iii_b", construct_case_iii("b", c=bg["a"], x=bg["b"])))
    built.append(("case_iii_b_inv", construct_case_iii("b", c=bg["a"], x=bg["b"].inverse())))
    for label, s in built:
        summary.subsets_examined += 1
        size = len(square(s))
        summary.outcomes[label.split(":")[0]] += 1
        if size != 3 * len(s) - 2:
            f = Finding(Kind.CONVERSES.value, str(s.tag), "", len(s), tuple(s.literals()), size,
                        "|S^2| = 3|S|-2", label)
            summary.findings.append(f)
            if on_finding:
                on_finding(f)
    summary.seconds = time.perf_counter() - t0
    return summary


# ---------------------------------------------------------------------------
# Drivers


def run_task(
    task: VerificationTask,
    workers: int = 1,
    on_finding: Optional[Callable[[Finding], None]] = None,
    executor: Optional[ProcessPoolExecutor] = None,
) -> VerificationSummary:
    if task.kind is Kind.LEMMA_EXT:
        return verify_lemma_extension(task.triple or (), task.ball, on_finding)
    if task.kind is Kind.CONVERSES:
        return verify_converses(on_finding)
    if task.ball is None:
        raise GroupError(f"{task.kind.value} needs a ball")
    if task.kind is not Kind.UPPER_BOUND and task.k < 3:
        raise GroupError(f"{task.kind.value} needs k >= 3")
    if task.kind is Kind.THEOREM_1 and task.k < 4:
        raise GroupError("THEOREM_1 needs k >= 4")
    if task.kind is Kind.TRIPLE_PROPS and task.k != 3:
        raise GroupError("TRIPLE_PROPS needs k = 3")
    if task.kind is Kind.PROP11_CERT:
        if task.tag not in (FIB, BS12):
            raise GroupError("PROP11_CERT runs on fib or bs12")
        if task.certificate is None:
            task = _replace(task, certificate=default_certificate(task.tag))
    summary = VerificationSummary(task)
    t0 = time.perf_counter()
    ctx = _context(task.ball, task.k, task.certificate)
    jobs = [(task, start, count) for start, count in _chunks(ctx.total, workers)]
    if executor is not None and len(jobs) > 1:
        results = executor.map(_evaluate_chunk, jobs)
    else:
        results = map(_evaluate_chunk, jobs)
    for examined, findings, outcomes in results:
        summary.subsets_examined += examined
        summary.outcomes.update(outcomes)
        for f in findings:
            summary.findings.append(f)
            if on_finding:
                on_finding(f)
    summary.seconds = time.perf_counter() - t0
    return summary


def _replace(task: VerificationTask, **changes) -> VerificationTask:
    from dataclasses import replace

    return replace(task, **changes)


def run_tasks(
    tasks: Sequence[VerificationTask],
    workers: int = 1,
    on_finding: Optional[Callable[[Finding], None]] = None,
) -> list[VerificationSummary]:
    """Run tasks in order; a failing task records its error and the batch continues."""
    out: list[VerificationSummary] = []
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 and tasks else None
    try:
        for task in tasks:
            try:
                out.append(run_task(task, workers, on_finding, executor))
            except (GroupError, KeyError, ValueError) as exc:
                log.error("task %s failed: %s", task.kind.value, exc)
                out.append(VerificationSummary(task, error=str(exc)))
    finally:
        if executor is not None:
            executor.shutdown()
    return out


def verify_theorem_C(task: VerificationTask, workers: int = 1) -> VerificationSummary:
    return run_task(_replace(task, kind=Kind.THEOREM_C), workers)


def verify_theorem_D(task: VerificationTask, workers: int = 1) -> VerificationSummary:
    return run_task(_replace(task, kind=Kind.THEOREM_D), workers)


def verify_theorem_1(task: VerificationTask, workers: int = 1) -> VerificationSummary:
    return run_task(_replace(task, kind=Kind.THEOREM_1), workers)


def verify_prop11_certificate(ball: BallSpec, workers: int = 1) -> VerificationSummary:
    return run_task(VerificationTask(Kind.PROP11_CERT, ball.tag, ball, 5), workers)


def verify_triple_props(task: VerificationTask, workers: int = 1) -> VerificationSummary:
    return run_task(_replace(task, kind=Kind.TRIPLE_PROPS, k=3), workers)
