"""Kernel backend selection: compiled extension when built, numpy otherwise.

Set ``CONVDUAL_PURE=1`` to force the pure backend (used by the benchmark and
the backend-equivalence tests).  Both backends are arithmetic-identical, so
the choice never changes results, only speed.
"""

from __future__ import annotations

import os

from . import _pure

if os.environ.get("CONVDUAL_PURE"):
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _pure
        BACKEND = "pure"

maxaffine_grid_sup = _impl.maxaffine_grid_sup
node_lp_batch = _impl.node_lp_batch
product_table_max = _impl.product_table_max
