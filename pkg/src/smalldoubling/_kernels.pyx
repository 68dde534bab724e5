# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled subset scanner; see ``smalldoubling.kernels`` for the contract."""

from math import comb

import numpy as np

from ._kernels_py import unrank_combination


def scan_subsets(const int[:, ::1] table, int n_ids, const long long[::1] fixed,
                 const long long[::1] free, int kfree, long long start,
                 long long count, int lo, int hi):
    cdef Py_ssize_t nfix = fixed.shape[0]
    cdef Py_ssize_t m = free.shape[0]
    cdef Py_ssize_t k = nfix + kfree
    cdef long long[::1] stamp = np.zeros(max(n_ids, 1), dtype=np.int64)
    cdef long long[::1] combo = np.zeros(max(kfree, 1), dtype=np.int64)
    cdef long long[::1] idx = np.zeros(max(k, 1), dtype=np.int64)
    cdef long long cur = 0, done = 0
    cdef Py_ssize_t a, b, p, row
    cdef int size, pid
    hits = []
    if count <= 0 or kfree < 0 or kfree > m or start >= comb(m, kfree):
        return 0, hits
    first = unrank_combination(m, kfree, start)
    for p in range(kfree):
        combo[p] = first[p]
    for p in range(nfix):
        idx[p] = fixed[p]
    while done < count:
        for p in range(kfree):
            idx[nfix + p] = free[combo[p]]
        cur += 1
        size = 0
        for a in range(k):
            row = idx[a]
            for b in range(k):
                pid = table[row, idx[b]]
                if stamp[pid] != cur:
                    stamp[pid] = cur
                    size += 1
            if size > hi:
                break
        if lo <= size <= hi:
            hits.append((tuple(sorted([idx[p] for p in range(k)])), size))
        done += 1
        # lexicographic successor
        p = kfree - 1
        while p >= 0 and combo[p] == m - kfree + p:
            p -= 1
        if p < 0:
            break
        combo[p] += 1
        for a in range(p + 1, kfree):
            combo[a] = combo[a - 1] + 1
    return done, hits
