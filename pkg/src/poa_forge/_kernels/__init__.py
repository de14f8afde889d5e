"""Allocation-scan kernel with compiled/pure-Python backend selection.

The compiled extension is preferred when present; set
POA_FORGE_PURE_PYTHON=1 to force the pure-Python fallback.  Both backends
implement the same contract and are benchmarked against each other in
benchmarks/bench_kernels.py.
"""

import os

BACKEND = "python"
_force_py = os.environ.get("POA_FORGE_PURE_PYTHON", "") not in ("", "0")
if not _force_py:
    try:
        from ._scan_cy import scan_allocations  # noqa: F401
        BACKEND = "cython"
    except ImportError:
        from ._scan_py import scan_allocations  # noqa: F401
else:
    from ._scan_py import scan_allocations  # noqa: F401
