"""Kernel lane selection.

Prefers the compiled `_fast` extension; falls back to the pure-Python lane
when the extension is missing or when ROBUSTLAB_PURE is set (any nonempty
value).  Both lanes implement identical contracts, including node counting,
so results never depend on the lane.
"""

import os

if os.environ.get("ROBUSTLAB_PURE"):
    from . import _pure as _impl
else:
    try:
        from . import _fast as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pure as _impl

LANE = _impl.LANE
DFS_COMPLETE = _impl.DFS_COMPLETE
DFS_LIMIT = _impl.DFS_LIMIT
DFS_BUDGET = _impl.DFS_BUDGET

fp_rank_profile = _impl.fp_rank_profile
spark_dfs = _impl.spark_dfs
enumerate_signed_sums = _impl.enumerate_signed_sums

__all__ = [
    "LANE",
    "DFS_COMPLETE",
    "DFS_LIMIT",
    "DFS_BUDGET",
    "fp_rank_profile",
    "spark_dfs",
    "enumerate_signed_sums",
]
