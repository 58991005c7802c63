"""Regularity conditions connecting measure-a.e. selections to true selections,
plus the domain conditions governing when the duality gap closes.

All checkers work on the cell-complex representation, where the only
candidate points for irregularity are the nodes: cell interiors carry affine
bands and are automatically as regular as it gets.  The one-sided interval
topologies (left- and right-interval) are the finer topologies supported
here; with a strictly positive atomless base measure every one-sidedly open
neighborhood has positive measure, so those topologies always "support" the
base measure locally and no runtime check for that is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .convex import Interval
from .errors import InfeasibleError, SchemaError
from .functionals import (
    IntegrandField,
    _pole_constraints,
    domain_map,
    eval_Ih_window,
)
from .measures import BaseMeasure
from .plfun import PLFunction
from .setmap import (
    GEOM_TOL,
    IntervalUnion,
    MapLike,
    as_union,
    feasible_node_boxes,
    is_isc,
    kuratowski_limits,
    michael_selection,
    one_sided_limit,
)

INF = float("inf")


def mli_at(s: MapLike, node_index: int, mu: BaseMeasure | None = None) -> IntervalUnion:
    """Measure-theoretic inner limit at a node.

    Nodes are null for the (atomless) base measure while adjacent cells have
    full local measure, so the node override is invisible: the limit is the
    intersection of the two one-sided cell limits (single side at the
    boundary).
    """
    u = as_union(s)
    last = u.complex.n_nodes - 1
    if node_index == 0:
        return one_sided_limit(u, node_index, "right")
    if node_index == last:
        return one_sided_limit(u, node_index, "left")
    left = one_sided_limit(u, node_index, "left")
    right = one_sided_limit(u, node_index, "right")
    return left.intersect(right)


def is_outer_mu_regular(s: MapLike, mu: BaseMeasure | None = None) -> tuple[bool, tuple[int, ...]]:
    """mli at every node must land inside the (closed) node value."""
    u = as_union(s)
    bad = []
    for i in range(u.complex.n_nodes):
        if not mli_at(u, i, mu).subset_of(u.node_value(i)):
            bad.append(i)
    return (not bad, tuple(bad))


def _union_equal(a: IntervalUnion, b: IntervalUnion, tol: float = GEOM_TOL) -> bool:
    return a.subset_of(b, tol) and b.subset_of(a, tol)


def is_mu_continuous(s: MapLike, mu: BaseMeasure | None = None) -> tuple[bool, tuple[int, ...]]:
    """No removable discontinuities: at every node the value must equal one
    of the one-sided limits, i.e. the map extends continuously from the left
    or from the right in the corresponding one-sided interval topology."""
    u = as_union(s)
    if len(u.branches) != 1:
        raise SchemaError("continuity check expects a single-branch map")
    bad = []
    last = u.complex.n_nodes - 1
    for i in range(u.complex.n_nodes):
        val = u.node_value(i)
        sides = []
        if i > 0:
            sides.append(one_sided_limit(u, i, "left"))
        if i < last:
            sides.append(one_sided_limit(u, i, "right"))
        if not any(_union_equal(val, side) for side in sides):
            bad.append(i)
    return (not bad, tuple(bad))


def is_tau_full(s: MapLike) -> tuple[bool, tuple[int, ...]]:
    """Two-stage limit condition in the standard topology.

    Stage one forms the outer-limit map (cells unchanged; each node value
    replaced by the union of its one-sided limits and itself).  Stage two
    takes the inner limit of that map at each node and requires it inside
    the closed node value.  Node overrides are invisible to stage two
    because nodes are isolated in their punctured neighborhoods.
    """
    u = as_union(s)
    bad = []
    for i in range(u.complex.n_nodes):
        # stage 1 changes only node values, which stage 2 cannot see (nodes
        # are isolated in their punctured neighborhoods), so the inner limit
        # of the outer-limit map equals the inner limit of the map itself
        inner, _ = kuratowski_limits(u, i)
        if not inner.subset_of(u.node_value(i)):
            bad.append(i)
    return (not bad, tuple(bad))


def is_full_lsc(s: MapLike) -> tuple[bool, tuple[int, ...]]:
    """Graph-interior condition for solid convex-valued maps: the interior of
    the two-sided limit must lie inside the interior of the node value."""
    u = as_union(s)
    if len(u.branches) != 1:
        raise SchemaError("full lower semicontinuity expects a single-branch map")
    m = u.branches[0]
    for band in m.cells:
        if band is None or not (band.l_left < band.u_left and band.l_right < band.u_right):
            raise SchemaError("full lower semicontinuity expects a solid map")
    bad = []
    last = m.complex.n_nodes - 1
    for i in range(m.complex.n_nodes):
        if i in (0, last):
            lim = (
                one_sided_limit(m, i, "right" if i == 0 else "left").hull()
            )
        else:
            lim = (
                one_sided_limit(m, i, "left")
                .intersect(one_sided_limit(m, i, "right"))
                .hull()
            )
        if lim.is_empty or lim.lo >= lim.hi:
            continue
        val = m.node_values[i]
        if val.is_empty or not (val.lo <= lim.lo + GEOM_TOL and lim.hi <= val.hi + GEOM_TOL):
            bad.append(i)
    return (not bad, tuple(bad))


def _rinterior_samples(iv: Interval, clamp: float = 10.0) -> list[float]:
    """Deterministic sample of the relative interior: midpoint, quartiles and
    near-endpoint insets (endpoints clamped when infinite)."""
    lo = iv.lo if math.isfinite(iv.lo) else -clamp
    hi = iv.hi if math.isfinite(iv.hi) else clamp
    if lo > hi:
        return []
    if lo == hi:
        return [lo]
    w = hi - lo
    pts = [lo + 0.5 * w, lo + 0.25 * w, lo + 0.75 * w]
    eps = 1e-3 * w
    if math.isfinite(iv.lo):
        pts.append(iv.lo + eps)
    if math.isfinite(iv.hi):
        pts.append(iv.hi - eps)
    return pts


@dataclass(frozen=True)
class IcResult:
    ok: bool
    witnesses: tuple[tuple[float, float], ...]


def check_ic_condition(h: IntegrandField, mu: BaseMeasure) -> IcResult:
    """Local-integrability condition: through every relative-interior value of
    every node domain there must pass a continuous domain selection whose
    integral is finite on a neighborhood of the node.

    Unit-weight cells are locally integrable outright; endpoint poles are the
    only failure mode, so each sampled value is tested by anchoring a
    selection there and integrating over the half-cell window.
    """
    d = domain_map(h)
    ok_isc, _ = is_isc(d)
    if not ok_isc:
        raise SchemaError("condition check requires an inner semicontinuous domain map")
    michael_selection(d)  # precondition: the selection set is nonempty
    witnesses = []
    for i in range(h.complex.n_nodes):
        t = h.complex.nodes[i]
        for v in _rinterior_samples(h.nodes[i].dom):
            try:
                y = michael_selection(d, anchor=(i, v))
            except InfeasibleError:
                witnesses.append((t, v))
                continue
            if eval_Ih_window(h, y, mu, i) == INF:
                witnesses.append((t, v))
    return IcResult(not witnesses, tuple(witnesses))


@dataclass(frozen=True)
class ClosureResult:
    ok: bool
    witness: str | None
    dom_subset_ok: bool


def check_closure_condition(
    h: IntegrandField, mu: BaseMeasure, refinement: int = 1, eps: float = 1e-6
) -> ClosureResult:
    """Approximability of domain selections by finite-integral selections.

    A deterministic family of extreme selections (upper, lower, midpoint, and
    a spike through each original node) is tested for eps-approximability
    subject to the finite-integral constraints (endpoint poles force the
    weighted composition to vanish).  Within the unit-weight class the test
    is structurally always true; weighted cells are the genuine failure mode.

    Also reports the stronger inclusion needed for conjugating the integral
    functional alone: every continuous function with finite integral must
    already be a domain selection, checked structurally node by node.
    """
    hr = h.refined(refinement) if refinement > 1 else h
    d = domain_map(hr)
    constraints = _pole_constraints(hr)
    boxes = feasible_node_boxes(d)
    n = len(boxes)
    for i, g in enumerate(boxes):
        if g.is_empty:
            raise InfeasibleError(f"no domain selection through node {i}", node=i)

    def rep(iv: Interval, prefer: str) -> float:
        if prefer == "hi":
            if math.isfinite(iv.hi):
                return iv.hi
            return iv.lo + 1e3 if math.isfinite(iv.lo) else 1e3
        if prefer == "lo":
            if math.isfinite(iv.lo):
                return iv.lo
            return iv.hi - 1e3 if math.isfinite(iv.hi) else -1e3
        return iv.pick()

    family: list[tuple[str, list[float]]] = [
        ("upper", [rep(g, "hi") for g in boxes]),
        ("lower", [rep(g, "lo") for g in boxes]),
        ("midpoint", [rep(g, "mid") for g in boxes]),
    ]
    for j in range(h.complex.n_nodes):
        i = j * refinement
        spike = [rep(g, "mid") for g in boxes]
        spike[i] = rep(boxes[i], "hi")
        family.append((f"spike@{h.complex.nodes[j]}", spike))

    witness = None
    for name, yvals in family:
        for i in range(n):
            g = boxes[i].intersect(Interval(yvals[i] - eps, yvals[i] + eps))
            if i in constraints:
                g = g.intersect(constraints[i])
            if g.is_empty:
                witness = f"{name} not approximable at node {i}"
                break
        if witness:
            break

    dom_ok = True
    for i in range(n):
        lim = mli_at(d, i)
        extra = constraints.get(i)
        if extra is not None:
            lim = lim.intersect(IntervalUnion.of([extra]))
        if not lim.subset_of(IntervalUnion.of([d.node_values[i]])):
            dom_ok = False
            break

    return ClosureResult(witness is None, witness, dom_ok)


def mu_selection_check(
    y: PLFunction, s: MapLike, mu: BaseMeasure | None = None
) -> tuple[bool, bool]:
    """(is a mu-a.e. selection, is a selection of the image closure).

    The first flag tests membership on the open cells only (nodes are null);
    the second additionally tests every node value.  Cell membership of a PL
    function in a union of affine bands is decided exactly by sampling the
    midpoints of the crossing partition.
    """
    u = as_union(s)
    if u.complex.nodes != y.complex.nodes:
        raise SchemaError("selection check requires a shared complex")
    cells_ok = True
    for i in range(u.complex.n_cells):
        c, d = u.complex.cell(i)
        yl, yr = y.values[i], y.values[i + 1]
        cut = {c, d}
        for b in u.branches:
            band = b.cells[i]
            if band is None:
                continue
            for fl, fr in ((band.l_left, band.l_right), (band.u_left, band.u_right)):
                if math.isinf(fl):
                    continue
                dl, dr = yl - fl, yr - fr
                if dl * dr < 0:
                    cut.add(c + (d - c) * dl / (dl - dr))
        pts = sorted(cut)
        for t0, t1 in zip(pts, pts[1:]):
            tm = 0.5 * (t0 + t1)
            yv = y(tm)
            member = False
            for b in u.branches:
                band = b.cells[i]
                if band is None:
                    continue
                if band.lower(c, d, tm) - GEOM_TOL <= yv <= band.upper(c, d, tm) + GEOM_TOL:
                    member = True
                    break
            if not member:
                cells_ok = False
                break
        if not cells_ok:
            break
    nodes_ok = all(
        u.node_value(i).contains(y.values[i]) for i in range(u.complex.n_nodes)
    )
    return cells_ok, cells_ok and nodes_ok


@dataclass(frozen=True)
class RegularityReport:
    """Per-node regularity flags (full_lsc only for solid single-branch maps)."""

    node_coords: tuple[float, ...]
    isc: tuple[bool, ...]
    osc: tuple[bool, ...]
    outer_mu_regular: tuple[bool, ...]
    mu_continuous: tuple[bool, ...] | None
    tau_full: tuple[bool, ...]
    full_lsc: tuple[bool, ...] | None


def analyze_map(s: MapLike, mu: BaseMeasure | None = None) -> RegularityReport:
    from .setmap import is_osc

    u = as_union(s)
    n = u.complex.n_nodes

    def flags(result: tuple[bool, tuple[int, ...]]) -> tuple[bool, ...]:
        _, bad = result
        badset = set(bad)
        return tuple(i not in badset for i in range(n))

    mu_cont = None
    if len(u.branches) == 1:
        mu_cont = flags(is_mu_continuous(u, mu))
    full = None
    try:
        full = flags(is_full_lsc(u))
    except SchemaError:
        pass
    return RegularityReport(
        node_coords=u.complex.nodes,
        isc=flags(is_isc(u)),
        osc=flags(is_osc(u)),
        outer_mu_regular=flags(is_outer_mu_regular(u, mu)),
        mu_continuous=mu_cont,
        tau_full=flags(is_tau_full(u)),
        full_lsc=full,
    )
