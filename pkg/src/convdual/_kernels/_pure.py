"""Pure numpy implementations of the hot kernels.

These mirror the compiled versions in ``_fast.pyx`` operation for operation:
identical candidate orders, identical accumulation association, and
order-independent reductions (max), so the two backends return bit-identical
results and reports do not depend on which one is active.
"""

from __future__ import annotations

import math

import numpy as np

INF = float("inf")

# Largest broadcast block for the exhaustive product-grid maximization.
_BLOCK_LIMIT = 1 << 22


def maxaffine_grid_sup(a, b, dom_lo, dom_hi, xs, vs):
    """For each v in vs: max over grid x of v*x - f(x), f max-affine on [dom_lo, dom_hi]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    xs = np.asarray(xs, dtype=np.float64)
    vs = np.asarray(vs, dtype=np.float64)
    fx = a[0] * xs + b[0]
    for k in range(1, len(a)):
        fx = np.maximum(fx, a[k] * xs + b[k])
    inside = (xs >= dom_lo) & (xs <= dom_hi)
    out = np.empty(len(vs), dtype=np.float64)
    for j in range(len(vs)):
        vals = np.where(inside, vs[j] * xs - fx, -INF)
        out[j] = vals.max() if len(vals) else -INF
    return out


def _node_solve(c, lo, hi, weights, pieces):
    """Maximize c*y - sum w_j * maxaffine_j(y) over y in [lo, hi].

    ``pieces`` is a list of (a_array, b_array) with slopes ascending
    (canonical).  Returns (value, argmax); unbounded problems return
    (+inf, nan).  Candidates are the finite box endpoints plus every
    piece crossing inside the box, evaluated in a fixed order.
    """
    if lo == -INF:
        s = c
        for w, (pa, _) in zip(weights, pieces):
            s -= w * pa[0]
        if s < 0.0:
            return INF, math.nan
    if hi == INF:
        s = c
        for w, (pa, _) in zip(weights, pieces):
            s -= w * pa[-1]
        if s > 0.0:
            return INF, math.nan
    cands = []
    if lo != -INF:
        cands.append(lo)
    if hi != INF:
        cands.append(hi)
    for _, (pa, pb) in zip(weights, pieces):
        for k in range(len(pa) - 1):
            x = (pb[k] - pb[k + 1]) / (pa[k + 1] - pa[k])
            if lo <= x <= hi:
                cands.append(x)
    if not cands:
        cands.append(0.0)
    best = -INF
    ybest = math.nan
    for y in cands:
        val = c * y
        for w, (pa, pb) in zip(weights, pieces):
            m = pa[0] * y + pb[0]
            for k in range(1, len(pa)):
                m = max(m, pa[k] * y + pb[k])
            val -= w * m
        if val > best:
            best = val
            ybest = y
    return best, ybest


def node_lp_batch(c, lo, hi, term_ptr, term_w, piece_ptr, pa, pb):
    """Solve the separable epigraph problems for a batch of nodes.

    CSR layout: node i owns terms term_ptr[i]:term_ptr[i+1]; term j has
    weight term_w[j] and canonical pieces piece_ptr[j]:piece_ptr[j+1] in
    (pa, pb).  Returns (values, argmaxes) arrays.
    """
    c = np.asarray(c, dtype=np.float64)
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    term_ptr = np.asarray(term_ptr, dtype=np.int64)
    term_w = np.asarray(term_w, dtype=np.float64)
    piece_ptr = np.asarray(piece_ptr, dtype=np.int64)
    pa = np.asarray(pa, dtype=np.float64)
    pb = np.asarray(pb, dtype=np.float64)
    n = len(c)
    vals = np.empty(n, dtype=np.float64)
    ys = np.empty(n, dtype=np.float64)
    for i in range(n):
        weights = []
        pieces = []
        for j in range(term_ptr[i], term_ptr[i + 1]):
            weights.append(term_w[j])
            p0, p1 = piece_ptr[j], piece_ptr[j + 1]
            pieces.append((pa[p0:p1], pb[p0:p1]))
        vals[i], ys[i] = _node_solve(float(c[i]), float(lo[i]), float(hi[i]), weights, pieces)
    return vals, ys


def product_table_max(ptr, table_vals):
    """Exhaustive max of sum_i V_i[k_i] over the full product grid.

    Every tuple's objective is materialized (in blocks) with left-to-right
    accumulation over the node index, matching the compiled kernel's loop
    nest exactly.
    """
    ptr = np.asarray(ptr, dtype=np.int64)
    table_vals = np.asarray(table_vals, dtype=np.float64)
    n = len(ptr) - 1
    tables = [table_vals[ptr[i]:ptr[i + 1]] for i in range(n)]
    sizes = [len(t) for t in tables]
    if any(s == 0 for s in sizes):
        return -INF
    k = n
    prod = 1
    while k > 0 and prod * sizes[k - 1] <= _BLOCK_LIMIT:
        prod *= sizes[k - 1]
        k -= 1
    best = -INF
    outer_shape = sizes[:k]
    for outer in np.ndindex(*outer_shape):
        val = 0.0
        for i, ix in enumerate(outer):
            val += tables[i][ix]
        block = np.float64(val)
        for t in tables[k:]:
            block = np.asarray(block)[..., None] + t
        m = float(np.max(block))
        if m > best:
            best = m
    return best
