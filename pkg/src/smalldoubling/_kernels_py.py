"""Pure-Python subset scanner, used when the compiled module is unavailable."""

from __future__ import annotations

import itertools
from math import comb
from typing import Sequence


def unrank_combination(m: int, k: int, rank: int) -> list[int]:
    """The ``rank``-th k-subset of ``range(m)`` in lexicographic order."""
    if not 0 <= rank < max(comb(m, k), 1):
        raise ValueError(f"rank {rank} out of range for C({m}, {k})")
    out, x = [], 0
    for i in range(k):
        while True:
            block = comb(m - x - 1, k - i - 1)
            if rank < block:
                break
            rank -= block
            x += 1
        out.append(x)
        x += 1
    return out


def scan_subsets(
    table: Sequence[Sequence[int]],
    n_ids: int,
    fixed: Sequence[int],
    free: Sequence[int],
    kfree: int,
    start: int,
    count: int,
    lo: int,
    hi: int,
) -> tuple[int, list[tuple[tuple[int, ...], int]]]:
    rows = table.tolist() if hasattr(table, "tolist") else table
    fixed = [int(i) for i in fixed]
    free = [int(i) for i in free]
    hits = []
    done = 0
    if count <= 0:
        return 0, hits
    combos = itertools.islice(itertools.combinations(free, kfree), start, start + count)
    for combo in combos:
        idx = fixed + list(combo)
        seen: set[int] = set()
        for a in idx:
            row = rows[a]
            seen.update(row[b] for b in idx)
            if len(seen) > hi:
                break
        size = len(seen)
        if lo <= size <= hi:
            hits.append((tuple(sorted(idx)), size))
        done += 1
    return done, hits
