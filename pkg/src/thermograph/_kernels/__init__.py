"""Hot-kernel dispatch.

THERMOGRAPH_NUMBA selects the backend at import time:
  "1"    force the numba implementation (ImportError if numba is missing)
  "0"    force the pure numpy fallback
  unset / "auto"   use numba when importable, else fall back silently

Both backends export the same functions with identical semantics; the
equivalence is pinned by tests and timed by benchmarks/bench_kernels.py.
"""

import os

_flag = os.environ.get("THERMOGRAPH_NUMBA", "auto").strip().lower()

if _flag in ("0", "off", "false", "numpy"):
    from . import numpy_impl as _impl
elif _flag in ("1", "on", "true", "numba"):
    from . import numba_impl as _impl
else:
    try:
        from . import numba_impl as _impl
    except ImportError:
        from . import numpy_impl as _impl

BACKEND = _impl.BACKEND
dfs_return_weight_sums = _impl.dfs_return_weight_sums
dfs_find_cycle_in_range = _impl.dfs_find_cycle_in_range
taboo_series = _impl.taboo_series
poly_eval = _impl.poly_eval
power_iteration = _impl.power_iteration
jumpy_series_sums = _impl.jumpy_series_sums
chain_exp_sums = _impl.chain_exp_sums
