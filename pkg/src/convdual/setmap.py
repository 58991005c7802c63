"""Set-valued mappings on a cell complex over a compact interval.

A mapping assigns to each open cell an interval band with affine lower and
upper bounds (or the empty set), and to each node an arbitrary interval
override.  All limit computations (one-sided limits, Kuratowski
liminf/limsup) are exact for this data class, which is what makes the
semicontinuity checkers and the selection construction exact rather than
sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .convex import INF, Interval
from .errors import InfeasibleError, SchemaError

# Slack used when validating band ordering and interval memberships; data is
# closed-form so only rounding noise needs absorbing.
GEOM_TOL = 1e-9


@dataclass(frozen=True)
class CellComplex:
    """Strictly increasing node grid spanning a compact interval."""

    nodes: tuple[float, ...]

    def __post_init__(self):
        if len(self.nodes) < 2:
            raise SchemaError("a cell complex needs at least two nodes")
        ns = tuple(float(t) for t in self.nodes)
        if any(not math.isfinite(t) for t in ns):
            raise SchemaError("nodes must be finite")
        if any(ns[i] >= ns[i + 1] for i in range(len(ns) - 1)):
            raise SchemaError("nodes must be strictly increasing")
        object.__setattr__(self, "nodes", ns)

    @property
    def n_cells(self) -> int:
        return len(self.nodes) - 1

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def cell(self, i: int) -> tuple[float, float]:
        return self.nodes[i], self.nodes[i + 1]

    def cell_of(self, t: float) -> int:
        """Index of the cell whose closure contains t (ties go left)."""
        if t < self.nodes[0] or t > self.nodes[-1]:
            raise ValueError("point outside the complex")
        for i in range(self.n_cells):
            if t <= self.nodes[i + 1]:
                return i
        return self.n_cells - 1

    def refined(self, per_cell: int) -> "CellComplex":
        """Subdivide every cell into ``per_cell`` equal parts.

        Power-of-two counts nest exactly in floating point, which the
        refinement studies rely on for monotone comparisons.
        """
        if per_cell < 1:
            raise SchemaError("per_cell must be >= 1")
        out = []
        for i in range(self.n_cells):
            c, d = self.cell(i)
            out.append(c)
            for j in range(1, per_cell):
                out.append(c + (j * (d - c)) / per_cell)
        out.append(self.nodes[-1])
        return CellComplex(tuple(out))

    def refined_at(self, points) -> "CellComplex":
        """Insert extra interior nodes (used by intersections and hulls)."""
        first, last = self.nodes[0], self.nodes[-1]
        tol = 1e-12 * max(1.0, last - first)
        nodes = list(self.nodes)
        for p in sorted(points):
            if p <= first or p >= last:
                continue
            if any(abs(p - q) <= tol for q in nodes):
                continue
            nodes.append(p)
        return CellComplex(tuple(sorted(nodes)))


@dataclass(frozen=True)
class CellBand:
    """Affine interval band on one closed cell, given by endpoint values.

    Infinite bounds are allowed but must be infinite at both endpoints
    (an affine bound is either finite everywhere or a constant infinity).
    """

    l_left: float
    l_right: float
    u_left: float
    u_right: float

    def __post_init__(self):
        if math.isinf(self.l_left) != math.isinf(self.l_right):
            raise SchemaError("lower bound must be affine or identically -inf")
        if math.isinf(self.u_left) != math.isinf(self.u_right):
            raise SchemaError("upper bound must be affine or identically +inf")
        if self.l_left > self.u_left + GEOM_TOL or self.l_right > self.u_right + GEOM_TOL:
            raise SchemaError("lower bound exceeds upper bound on the cell")

    @staticmethod
    def constant(iv: Interval) -> "CellBand":
        if iv.is_empty:
            raise SchemaError("constant band from empty interval")
        return CellBand(iv.lo, iv.lo, iv.hi, iv.hi)

    def lower(self, c: float, d: float, t: float) -> float:
        if math.isinf(self.l_left):
            return -INF
        w = (t - c) / (d - c)
        return self.l_left + (self.l_right - self.l_left) * w

    def upper(self, c: float, d: float, t: float) -> float:
        if math.isinf(self.u_left):
            return INF
        w = (t - c) / (d - c)
        return self.u_left + (self.u_right - self.u_left) * w

    def at(self, c: float, d: float, t: float) -> Interval:
        lo = self.lower(c, d, t)
        hi = self.upper(c, d, t)
        # interpolation noise can invert a touching band by ~1e-16
        return Interval(lo, max(hi, lo))

    def left_interval(self) -> Interval:
        return Interval(self.l_left, self.u_left)

    def right_interval(self) -> Interval:
        return Interval(self.l_right, self.u_right)


@dataclass(frozen=True)
class IntervalMap:
    """One branch: a band (or nothing) per cell plus an interval per node."""

    complex: CellComplex
    cells: tuple[CellBand | None, ...]
    node_values: tuple[Interval, ...]

    def __post_init__(self):
        if len(self.cells) != self.complex.n_cells:
            raise SchemaError("cell count mismatch")
        if len(self.node_values) != self.complex.n_nodes:
            raise SchemaError("node count mismatch")

    @staticmethod
    def constant(complex_: CellComplex, iv: Interval) -> "IntervalMap":
        band = CellBand.constant(iv) if not iv.is_empty else None
        return IntervalMap(
            complex_,
            tuple(band for _ in range(complex_.n_cells)),
            tuple(iv for _ in range(complex_.n_nodes)),
        )

    @staticmethod
    def from_node_samples(
        complex_: CellComplex,
        lower: tuple[float, ...],
        upper: tuple[float, ...],
        node_values: tuple[Interval, ...] | None = None,
    ) -> "IntervalMap":
        """Continuous tube through per-node bound samples; optional node overrides."""
        cells = tuple(
            CellBand(lower[i], lower[i + 1], upper[i], upper[i + 1])
            for i in range(complex_.n_cells)
        )
        if node_values is None:
            node_values = tuple(Interval(lower[i], upper[i]) for i in range(complex_.n_nodes))
        return IntervalMap(complex_, cells, node_values)

    def with_node_value(self, i: int, iv: Interval) -> "IntervalMap":
        vals = list(self.node_values)
        vals[i] = iv
        return IntervalMap(self.complex, self.cells, tuple(vals))

    def value_at(self, t: float) -> Interval:
        """Set value at an arbitrary parameter (node override where applicable)."""
        nodes = self.complex.nodes
        for i, tn in enumerate(nodes):
            if t == tn:
                return self.node_values[i]
        i = self.complex.cell_of(t)
        band = self.cells[i]
        if band is None:
            return Interval.empty()
        c, d = self.complex.cell(i)
        return band.at(c, d, t)

    def cell_interval_at(self, i: int, t: float) -> Interval:
        band = self.cells[i]
        if band is None:
            return Interval.empty()
        c, d = self.complex.cell(i)
        return band.at(c, d, t)

    def refined(self, per_cell: int) -> "IntervalMap":
        """Same set-valued map on the subdivided complex."""
        fine = self.complex.refined(per_cell)
        cells: list[CellBand | None] = []
        node_values: list[Interval] = []
        for i in range(self.complex.n_cells):
            c, d = self.complex.cell(i)
            band = self.cells[i]
            node_values.append(self.node_values[i])
            for j in range(per_cell):
                tl = fine.nodes[i * per_cell + j]
                tr = fine.nodes[i * per_cell + j + 1]
                if band is None:
                    cells.append(None)
                else:
                    cells.append(
                        CellBand(
                            band.lower(c, d, tl),
                            band.lower(c, d, tr),
                            band.upper(c, d, tl),
                            band.upper(c, d, tr),
                        )
                    )
                if j < per_cell - 1:
                    node_values.append(
                        Interval.empty() if band is None else band.at(c, d, tr)
                    )
        node_values.append(self.node_values[-1])
        return IntervalMap(fine, tuple(cells), tuple(node_values))


@dataclass(frozen=True)
class UnionMap:
    """Finite pointwise union of interval maps over one complex."""

    branches: tuple[IntervalMap, ...]

    def __post_init__(self):
        if not self.branches:
            raise SchemaError("a union map needs at least one branch")
        nodes0 = self.branches[0].complex.nodes
        if any(b.complex.nodes != nodes0 for b in self.branches):
            raise SchemaError("branches must share one complex")

    @property
    def complex(self) -> CellComplex:
        return self.branches[0].complex

    def node_value(self, i: int) -> "IntervalUnion":
        return IntervalUnion.of(b.node_values[i] for b in self.branches)

    def value_at(self, t: float) -> "IntervalUnion":
        return IntervalUnion.of(b.value_at(t) for b in self.branches)

    def refined(self, per_cell: int) -> "UnionMap":
        return UnionMap(tuple(b.refined(per_cell) for b in self.branches))


MapLike = IntervalMap | UnionMap


def as_union(s: MapLike) -> UnionMap:
    return s if isinstance(s, UnionMap) else UnionMap((s,))


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted union of pairwise-disjoint closed intervals (gaps are genuine)."""

    parts: tuple[Interval, ...]

    @staticmethod
    def of(intervals) -> "IntervalUnion":
        items = sorted(
            (iv for iv in intervals if not iv.is_empty), key=lambda iv: (iv.lo, iv.hi)
        )
        merged: list[Interval] = []
        for iv in items:
            if merged and iv.lo <= merged[-1].hi + 1e-12:
                merged[-1] = Interval(merged[-1].lo, max(merged[-1].hi, iv.hi))
            else:
                merged.append(iv)
        return IntervalUnion(tuple(merged))

    @staticmethod
    def empty() -> "IntervalUnion":
        return IntervalUnion(())

    @property
    def is_empty(self) -> bool:
        return not self.parts

    def hull(self) -> Interval:
        if self.is_empty:
            return Interval.empty()
        return Interval(self.parts[0].lo, self.parts[-1].hi)

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion.of(self.parts + other.parts)

    def intersect(self, other: "IntervalUnion") -> "IntervalUnion":
        out = []
        for p in self.parts:
            for q in other.parts:
                r = p.intersect(q)
                if not r.is_empty:
                    out.append(r)
        return IntervalUnion.of(out)

    def subset_of(self, other: "IntervalUnion", tol: float = GEOM_TOL) -> bool:
        return all(
            any(p.subset_of(q, tol) for q in other.parts) for p in self.parts
        )

    def contains(self, x: float, tol: float = GEOM_TOL) -> bool:
        return any(p.contains(x, tol) for p in self.parts)

    def __str__(self) -> str:
        return " u ".join(str(p) for p in self.parts) if self.parts else "(empty)"


def one_sided_limit(s: MapLike, node_index: int, side: str) -> IntervalUnion:
    """Set limit at a node from the adjacent cell on the given side.

    For affine bands the limit is the band interval evaluated at the node;
    empty cells contribute nothing.
    """
    u = as_union(s)
    n = u.complex.n_nodes
    if side == "left":
        if node_index == 0:
            raise ValueError("no left cell at the first node")
        cell = node_index - 1
    elif side == "right":
        if node_index == n - 1:
            raise ValueError("no right cell at the last node")
        cell = node_index
    else:
        raise ValueError("side must be 'left' or 'right'")
    t = u.complex.nodes[node_index]
    return IntervalUnion.of(b.cell_interval_at(cell, t) for b in u.branches)


def kuratowski_limits(s: MapLike, node_index: int) -> tuple[IntervalUnion, IntervalUnion]:
    """(liminf, limsup) at a node; boundary nodes use the single available side.

    Sequences approaching an interior node can mix sides, so the liminf is
    the intersection of the one-sided limits and the limsup their union.
    """
    u = as_union(s)
    last = u.complex.n_nodes - 1
    if node_index == 0:
        lim = one_sided_limit(u, node_index, "right")
        return lim, lim
    if node_index == last:
        lim = one_sided_limit(u, node_index, "left")
        return lim, lim
    left = one_sided_limit(u, node_index, "left")
    right = one_sided_limit(u, node_index, "right")
    return left.intersect(right), left.union(right)


def is_isc(s: MapLike) -> tuple[bool, tuple[int, ...]]:
    """Inner semicontinuity: node values must sit inside the node liminf.

    Cell interiors are automatically inner semicontinuous for affine bands,
    so nodes are the only candidates for violations.
    """
    u = as_union(s)
    bad = []
    for i in range(u.complex.n_nodes):
        liminf, _ = kuratowski_limits(u, i)
        if not u.node_value(i).subset_of(liminf):
            bad.append(i)
    return (not bad, tuple(bad))


def is_osc(s: MapLike) -> tuple[bool, tuple[int, ...]]:
    """Outer semicontinuity: node limsup must sit inside the node value."""
    u = as_union(s)
    bad = []
    for i in range(u.complex.n_nodes):
        _, limsup = kuratowski_limits(u, i)
        if not limsup.subset_of(u.node_value(i)):
            bad.append(i)
    return (not bad, tuple(bad))


def image_closure(s: MapLike) -> MapLike:
    """Pointwise closure.  Values are closed by representation; identity kept
    for contract clarity (and it is idempotent by construction)."""
    if isinstance(s, UnionMap):
        return UnionMap(tuple(image_closure(b) for b in s.branches))
    return IntervalMap(s.complex, s.cells, s.node_values)


# ---------------------------------------------------------------------------
# The semicontinuity-preserving calculus
# ---------------------------------------------------------------------------


def affine_map(s: MapLike, m: float, c: float = 0.0) -> UnionMap:
    """Image map t -> {m*x + c : x in S_t}."""
    u = as_union(s)
    out = []
    for b in u.branches:
        cells = []
        for band in b.cells:
            if band is None:
                cells.append(None)
                continue
            lo_l, hi_l = sorted((m * band.l_left, m * band.u_left))
            lo_r, hi_r = sorted((m * band.l_right, m * band.u_right))
            # m == 0 collapses infinities to a point
            if m == 0.0:
                lo_l = hi_l = lo_r = hi_r = 0.0
            cells.append(CellBand(lo_l + c, lo_r + c, hi_l + c, hi_r + c))
        nodes = tuple(v.scale(m).shift(c) for v in b.node_values)
        out.append(IntervalMap(b.complex, tuple(cells), nodes))
    return UnionMap(tuple(out))


def sum_map(s1: MapLike, s2: MapLike) -> UnionMap:
    """Pointwise Minkowski sum (branch-pairwise)."""
    u1, u2 = as_union(s1), as_union(s2)
    if u1.complex.nodes != u2.complex.nodes:
        raise SchemaError("sum of maps on different complexes")
    out = []
    for b1 in u1.branches:
        for b2 in u2.branches:
            cells = []
            for x, y in zip(b1.cells, b2.cells):
                if x is None or y is None:
                    cells.append(None)
                else:
                    cells.append(
                        CellBand(
                            x.l_left + y.l_left,
                            x.l_right + y.l_right,
                            x.u_left + y.u_left,
                            x.u_right + y.u_right,
                        )
                    )
            nodes = tuple(
                p.minkowski_add(q) for p, q in zip(b1.node_values, b2.node_values)
            )
            out.append(IntervalMap(b1.complex, tuple(cells), nodes))
    return UnionMap(tuple(out))


def union_map(s1: MapLike, s2: MapLike) -> UnionMap:
    u1, u2 = as_union(s1), as_union(s2)
    if u1.complex.nodes != u2.complex.nodes:
        raise SchemaError("union of maps on different complexes")
    return UnionMap(u1.branches + u2.branches)


def _interior_crossings(cpx: CellComplex, i: int, f: tuple[float, float], g: tuple[float, float]):
    """Crossing parameters of two affine endpoint-value pairs inside cell i."""
    c, d = cpx.cell(i)
    dl = f[0] - g[0]
    dr = f[1] - g[1]
    if math.isinf(dl) or math.isinf(dr) or math.isnan(dl) or math.isnan(dr):
        return []
    if dl * dr < 0:
        return [c + (d - c) * dl / (dl - dr)]
    return []


def _band_values(band: CellBand | None, which: str) -> tuple[float, float]:
    if band is None:
        return (math.nan, math.nan)
    if which == "l":
        return (band.l_left, band.l_right)
    return (band.u_left, band.u_right)


def intersect_map(s1: MapLike, s2: MapLike) -> UnionMap:
    """Pointwise intersection; the complex is refined at bound crossings so
    the result is again affine-banded cell by cell."""
    u1, u2 = as_union(s1), as_union(s2)
    if u1.complex.nodes != u2.complex.nodes:
        raise SchemaError("intersection of maps on different complexes")
    cpx = u1.complex
    splits = []
    for i in range(cpx.n_cells):
        for b1 in u1.branches:
            for b2 in u2.branches:
                if b1.cells[i] is None or b2.cells[i] is None:
                    continue
                pairs = [
                    (_band_values(b1.cells[i], "l"), _band_values(b2.cells[i], "l")),
                    (_band_values(b1.cells[i], "u"), _band_values(b2.cells[i], "u")),
                    (_band_values(b1.cells[i], "l"), _band_values(b2.cells[i], "u")),
                    (_band_values(b2.cells[i], "l"), _band_values(b1.cells[i], "u")),
                ]
                for f, g in pairs:
                    splits.extend(_interior_crossings(cpx, i, f, g))
    fine = cpx.refined_at(splits)
    index_of_parent = [cpx.cell_of(0.5 * (fine.nodes[j] + fine.nodes[j + 1])) for j in range(fine.n_cells)]
    out = []
    for b1 in u1.branches:
        for b2 in u2.branches:
            cells: list[CellBand | None] = []
            node_values: list[Interval] = []
            for j in range(fine.n_cells):
                i = index_of_parent[j]
                c, d = cpx.cell(i)
                x, y = b1.cells[i], b2.cells[i]
                tl, tr = fine.nodes[j], fine.nodes[j + 1]
                if x is None or y is None:
                    cells.append(None)
                    continue
                ll = max(x.lower(c, d, tl), y.lower(c, d, tl))
                lr = max(x.lower(c, d, tr), y.lower(c, d, tr))
                ul = min(x.upper(c, d, tl), y.upper(c, d, tl))
                ur = min(x.upper(c, d, tr), y.upper(c, d, tr))
                if ul < ll - GEOM_TOL and ur < lr - GEOM_TOL:
                    cells.append(None)
                elif ul < ll - GEOM_TOL or ur < lr - GEOM_TOL:
                    # ordering flips inside; should have been split -- treat as empty
                    cells.append(None)
                else:
                    cells.append(CellBand(ll, lr, max(ul, ll), max(ur, lr)))
            for j, t in enumerate(fine.nodes):
                orig = None
                for k, tn in enumerate(cpx.nodes):
                    if t == tn:
                        orig = k
                        break
                if orig is not None:
                    node_values.append(b1.node_values[orig].intersect(b2.node_values[orig]))
                else:
                    node_values.append(b1.value_at(t).intersect(b2.value_at(t)))
            out.append(IntervalMap(fine, tuple(cells), tuple(node_values)))
    return UnionMap(tuple(out))


def hull_map(s: MapLike) -> IntervalMap:
    """Pointwise convex hull of a union map (componentwise interval hull)."""
    u = as_union(s)
    cpx = u.complex
    splits = []
    for i in range(cpx.n_cells):
        live = [b.cells[i] for b in u.branches if b.cells[i] is not None]
        for a_idx in range(len(live)):
            for b_idx in range(a_idx + 1, len(live)):
                for which in ("l", "u"):
                    splits.extend(
                        _interior_crossings(
                            cpx, i, _band_values(live[a_idx], which), _band_values(live[b_idx], which)
                        )
                    )
    fine = cpx.refined_at(splits)
    cells: list[CellBand | None] = []
    node_values: list[Interval] = []
    for j in range(fine.n_cells):
        i = cpx.cell_of(0.5 * (fine.nodes[j] + fine.nodes[j + 1]))
        c, d = cpx.cell(i)
        tl, tr = fine.nodes[j], fine.nodes[j + 1]
        live = [b.cells[i] for b in u.branches if b.cells[i] is not None]
        if not live:
            cells.append(None)
            continue
        ll = min(x.lower(c, d, tl) for x in live)
        lr = min(x.lower(c, d, tr) for x in live)
        ul = max(x.upper(c, d, tl) for x in live)
        ur = max(x.upper(c, d, tr) for x in live)
        cells.append(CellBand(ll, lr, ul, ur))
    for t in fine.nodes:
        orig = None
        for k, tn in enumerate(cpx.nodes):
            if t == tn:
                orig = k
                break
        if orig is not None:
            node_values.append(u.node_value(orig).hull())
        else:
            node_values.append(u.value_at(t).hull())
    return IntervalMap(fine, tuple(cells), tuple(node_values))


@dataclass(frozen=True)
class BoxMap:
    """Axis-aligned box product of two scalar maps (for isc testing only)."""

    first: UnionMap
    second: UnionMap

    def __post_init__(self):
        if self.first.complex.nodes != self.second.complex.nodes:
            raise SchemaError("box product of maps on different complexes")


def product_map(s1: MapLike, s2: MapLike) -> BoxMap:
    return BoxMap(as_union(s1), as_union(s2))


def box_is_isc(box: BoxMap) -> tuple[bool, tuple[int, ...]]:
    """isc of a box product: componentwise, except where the box is empty.

    Kuratowski limits of box products factor componentwise, so the node test
    reduces to the two scalar tests whenever both node values are nonempty.
    """
    bad = []
    for i in range(box.first.complex.n_nodes):
        v1 = box.first.node_value(i)
        v2 = box.second.node_value(i)
        if v1.is_empty or v2.is_empty:
            continue
        li1, _ = kuratowski_limits(box.first, i)
        li2, _ = kuratowski_limits(box.second, i)
        if not (v1.subset_of(li1) and v2.subset_of(li2)):
            bad.append(i)
    return (not bad, tuple(bad))


def map_op(kind: str, s1: MapLike, s2: MapLike | None = None, **kwargs):
    """Dispatcher over the map calculus (mirrors the CLI vocabulary)."""
    if kind == "affine":
        return affine_map(s1, kwargs.get("m", 1.0), kwargs.get("c", 0.0))
    if kind == "sum":
        return sum_map(s1, s2)
    if kind == "intersect":
        return intersect_map(s1, s2)
    if kind == "union":
        return union_map(s1, s2)
    if kind == "hull":
        return hull_map(s1)
    if kind == "product":
        return product_map(s1, s2)
    raise ValueError(f"unknown map operation {kind!r}")


# ---------------------------------------------------------------------------
# Continuous selections
# ---------------------------------------------------------------------------


def feasible_node_boxes(
    s: MapLike, node_constraints: dict[int, Interval] | None = None
) -> list[Interval]:
    """Per-node feasible intervals for a continuous piecewise-linear selection.

    A PL function lies in an affine band on a closed cell iff it does at both
    endpoints, so feasibility decouples: each node must satisfy its own value
    plus the adjacent bands evaluated at the node.  Empty cells make the whole
    problem infeasible.  Expects a convex-valued (single-branch) map; union
    maps are hulled by the callers.
    """
    u = as_union(s)
    if len(u.branches) > 1:
        raise SchemaError("feasible boxes need a convex-valued map; hull first")
    m = u.branches[0]
    cpx = m.complex
    for i, band in enumerate(m.cells):
        if band is None:
            raise InfeasibleError(f"empty cell {i}", node=i)
    boxes = []
    for i in range(cpx.n_nodes):
        t = cpx.nodes[i]
        g = m.node_values[i]
        if i > 0:
            g = g.intersect(m.cell_interval_at(i - 1, t))
        if i < cpx.n_nodes - 1:
            g = g.intersect(m.cell_interval_at(i, t))
        if node_constraints and i in node_constraints:
            g = g.intersect(node_constraints[i])
        boxes.append(g)
    return boxes


def michael_selection(
    s: MapLike,
    anchor: tuple[int, float] | None = None,
    node_constraints: dict[int, Interval] | None = None,
):
    """Continuous piecewise-linear selection through the (hulled) map.

    Feasible value intervals are propagated through each cell's affine
    bounds and clamped at the nodes; representatives are then picked
    deterministically (anchor value where requested, midpoints elsewhere).
    Raises :class:`InfeasibleError` with a witness node when no selection
    exists or the anchor cannot be honored.
    """
    from .plfun import PLFunction

    u = as_union(s)
    if len(u.branches) > 1:
        m = hull_map(u)
        if anchor is not None:
            t = u.complex.nodes[anchor[0]]
            anchor = (m.complex.nodes.index(t), anchor[1])
        if node_constraints:
            remapped = {}
            for i, iv in node_constraints.items():
                remapped[m.complex.nodes.index(u.complex.nodes[i])] = iv
            node_constraints = remapped
    else:
        m = u.branches[0]
    boxes = feasible_node_boxes(m, node_constraints)
    values = []
    for i, g in enumerate(boxes):
        if g.is_empty:
            raise InfeasibleError(f"no feasible value at node {i}", node=i)
        if anchor is not None and anchor[0] == i:
            if not g.contains(anchor[1], GEOM_TOL):
                raise InfeasibleError(f"anchor outside feasible set at node {i}", node=i)
            values.append(anchor[1])
        else:
            values.append(g.pick())
    return PLFunction(m.complex, tuple(values))
