"""Backend selection for the subset scanner.

``scan_subsets(table, n_ids, fixed, free, kfree, start, count, lo, hi)`` walks
``count`` subsets in lexicographic rank order starting at ``start``. Each
subset is ``fixed`` plus ``kfree`` entries of ``free``; its square size is
the number of distinct ids ``table[i, j]`` over its index pairs. Subsets
with ``lo <= size <= hi`` are returned as ``(sorted indices, size)``.

The compiled backend is used when importable unless ``SMALLDOUBLING_KERNEL``
is set to ``python``.
"""

from __future__ import annotations

import os

from . import _kernels_py as python_backend
from ._kernels_py import unrank_combination

try:
    from . import _kernels as cython_backend
except ImportError:  # not built
    cython_backend = None

if cython_backend is not None and os.environ.get("SMALLDOUBLING_KERNEL", "").lower() != "python":
    scan_subsets = cython_backend.scan_subsets
    BACKEND = "cython"
else:
    scan_subsets = python_backend.scan_subsets
    BACKEND = "python"

__all__ = ["scan_subsets", "unrank_combination", "BACKEND", "python_backend", "cython_backend"]
