"""Seeded random corpora for the property suites.

All generators draw from a ``random.Random`` instance supplied by the caller,
so every corpus is reproducible from a single seed.  Numeric data is kept on
coarse lattices: breakpoints and domain endpoints land on multiples of 0.05,
slopes and masses on multiples of 0.25.  That keeps brute-force grids exact
(grid points hit the attainment points up to 1e-15) and keeps magnitudes
small enough that the refinement studies meet their stated tolerances.
"""

from __future__ import annotations

from random import Random

from .convex import Interval, PolyConvexFn
from .functionals import CellIntegrand, IntegrandField
from .measures import BaseMeasure, SignedMeasure
from .plfun import PLFunction
from .setmap import CellComplex, IntervalMap, UnionMap, michael_selection

INF = float("inf")


def _lattice(rng: Random, lo: float, hi: float, step: float) -> float:
    n = round((hi - lo) / step)
    return lo + step * rng.randint(0, n)


def rand_polyconvex(rng: Random, max_pieces: int = 8) -> PolyConvexFn:
    """Random function with ascending lattice slopes and lattice breakpoints.

    Intercepts are derived from the chosen breakpoints, so every piece is
    active on the line and every breakpoint is an exact lattice point.
    """
    n = rng.randint(1, max_pieces)
    slopes = sorted(rng.sample([round(-3.0 + 0.25 * k, 2) for k in range(25)], n))
    if n == 1:
        pieces = [(slopes[0], _lattice(rng, -2.0, 2.0, 0.25))]
    else:
        xs = sorted(rng.sample([round(-2.0 + 0.05 * k, 2) for k in range(81)], n - 1))
        b = _lattice(rng, -2.0, 2.0, 0.25)
        pieces = [(slopes[0], b)]
        for k in range(n - 1):
            b = b + xs[k] * (slopes[k] - slopes[k + 1])
            pieces.append((slopes[k + 1], b))
    # domain endpoints live on a lattice offset from the breakpoint lattice,
    # so no crossing can collide with an endpoint (keep/drop stays stable)
    shape = rng.random()
    if shape < 0.35:
        dom = Interval.real_line()
    elif shape < 0.55:
        dom = Interval(0.025 + _lattice(rng, -2.5, 0.0, 0.05), INF)
    elif shape < 0.75:
        dom = Interval(-INF, 0.025 + _lattice(rng, 0.0, 2.5, 0.05))
    elif shape < 0.95:
        lo = 0.025 + _lattice(rng, -2.5, 0.0, 0.05)
        dom = Interval(lo, lo + 0.5 + _lattice(rng, 0.0, 4.0, 0.05))
    else:
        p = 0.025 + _lattice(rng, -2.0, 2.0, 0.05)
        dom = Interval(p, p)
    return PolyConvexFn(tuple(pieces), dom)


def rand_complex(rng: Random, max_cells: int = 3) -> CellComplex:
    n = rng.randint(1, max_cells)
    t = _lattice(rng, -1.0, 0.0, 0.25)
    nodes = [t]
    for _ in range(n):
        t = t + 0.25 + _lattice(rng, 0.0, 0.75, 0.25)
        nodes.append(t)
    return CellComplex(tuple(nodes))


def rand_tube(
    rng: Random,
    cpx: CellComplex,
    solid: bool = False,
    shrink_nodes: bool = True,
) -> IntervalMap:
    """Continuous interval tube with optionally shrunken node overrides.

    The band limits agree from both sides at every node, so the tube is
    inner semicontinuous for any node values inside the band; shrinking node
    values is what produces non-osc / non-outer-regular cases.
    """
    lower = []
    width = []
    for _ in range(cpx.n_nodes):
        lower.append(_lattice(rng, -1.0, 0.75, 0.25))
        wmin = 0.25 if solid else 0.0
        width.append(wmin + _lattice(rng, 0.0, 1.0 - wmin, 0.25))
    upper = [lo + w for lo, w in zip(lower, width)]
    node_values = []
    for i in range(cpx.n_nodes):
        iv = Interval(lower[i], upper[i])
        if shrink_nodes and not solid and rng.random() < 0.4 and width[i] > 0:
            a = rng.random() * width[i]
            b = rng.random() * width[i]
            lo2, hi2 = min(a, b), max(a, b)
            iv = Interval(lower[i] + lo2, lower[i] + hi2)
        node_values.append(iv)
    return IntervalMap.from_node_samples(
        cpx, tuple(lower), tuple(upper), tuple(node_values)
    )


def rand_isc_union(rng: Random, cpx: CellComplex, max_branches: int = 3) -> UnionMap:
    k = rng.randint(1, max_branches)
    return UnionMap(tuple(rand_tube(rng, cpx) for _ in range(k)))


def margin_tube(s, radius: float) -> IntervalMap:
    """Tube of the given radius around a continuous selection of ``s``.

    Used as the second operand of intersections: the selection runs through
    the node values, so the intersection keeps an interior overlap point
    everywhere, which is the 1-D overlap-margin condition.
    """
    y = michael_selection(s)
    lower = tuple(v - radius for v in y.values)
    upper = tuple(v + radius for v in y.values)
    return IntervalMap.from_node_samples(y.complex, lower, upper)


def rand_measure(
    rng: Random, base: BaseMeasure, allow_atoms: bool = True, atom_rate: float = 0.35
) -> SignedMeasure:
    dens = tuple(_lattice(rng, -1.0, 2.0, 0.25) for _ in range(base.complex.n_cells))
    atoms = []
    if allow_atoms:
        for j in range(base.complex.n_nodes):
            if rng.random() < atom_rate:
                w = _lattice(rng, 0.25, 1.0, 0.25)
                atoms.append((j, w if rng.random() < 0.5 else -w))
    return SignedMeasure(base, dens, tuple(atoms))


def rand_base(rng: Random, cpx: CellComplex) -> BaseMeasure:
    return BaseMeasure(
        cpx, tuple(0.5 + _lattice(rng, 0.0, 1.0, 0.25) for _ in range(cpx.n_cells))
    )


def rand_domain_tube(rng: Random, cpx: CellComplex):
    """Per-cell constant domains with overlapping neighbors plus matching
    node domains (the intersection), giving an isc domain map with
    feasible selections."""
    doms = []
    lo = _lattice(rng, -1.0, 0.0, 0.25)
    hi = lo + 0.5 + _lattice(rng, 0.0, 1.0, 0.25)
    for _ in range(cpx.n_cells):
        lo = lo + _lattice(rng, -0.25, 0.25, 0.25)
        hi = max(lo + 0.5, hi + _lattice(rng, -0.25, 0.25, 0.25))
        doms.append(Interval(lo, hi))
    node_doms = [doms[0]]
    for i in range(1, cpx.n_cells):
        node_doms.append(doms[i - 1].intersect(doms[i]))
    node_doms.append(doms[-1])
    return doms, node_doms


def rand_integrand_field(rng: Random, cpx: CellComplex) -> IntegrandField:
    """Unit-weight field with an isc domain map and nonempty selection set."""
    doms, node_doms = rand_domain_tube(rng, cpx)

    def fn_on(dom: Interval) -> PolyConvexFn:
        style = rng.random()
        if style < 0.4:
            return PolyConvexFn(((0.0, 0.0),), dom)
        if style < 0.7:
            center = 0.5 * (dom.lo + dom.hi)
            return PolyConvexFn(((-1.0, center), (1.0, -center)), dom)
        a1 = _lattice(rng, -2.0, 0.0, 0.25)
        a2 = a1 + 0.25 + _lattice(rng, 0.0, 2.0, 0.25)
        x = 0.5 * (dom.lo + dom.hi)
        return PolyConvexFn(((a1, -a1 * x), (a2, -a2 * x)), dom)

    cells = tuple(CellIntegrand(fn_on(d)) for d in doms)
    nodes = tuple(fn_on(d) for d in node_doms)
    return IntegrandField(cpx, cells, nodes)


def optimal_pair(rng: Random):
    """(field, base, y, theta) satisfying the pointwise optimality conditions
    exactly, built from subdifferential selections around a shared kink.

    The slope jump at the kink is kept below 0.2 and the density sits at the
    jump midpoint, so perturbing the density by 0.1 always exits the
    subdifferential and perturbing a node value by 0.1 always crosses the
    kink: both failure modes are guaranteed, not generic.
    """
    cpx = rand_complex(rng, max_cells=3)
    xhat = _lattice(rng, -1.0, 1.0, 0.25)
    base = rand_base(rng, cpx)
    cells = []
    dens = []
    for _ in range(cpx.n_cells):
        d_minus = _lattice(rng, -1.0, 1.0, 0.25)
        jump = 0.1 if rng.random() < 0.5 else 0.15
        d_plus = d_minus + jump
        fn = PolyConvexFn(
            ((d_minus, -d_minus * xhat), (d_plus, -d_plus * xhat)),
            Interval(xhat - 1.0, xhat + 1.0),
        )
        cells.append(CellIntegrand(fn))
        dens.append(d_minus + 0.5 * jump)
    nodes = []
    atoms = []
    for j in range(cpx.n_nodes):
        if rng.random() < 0.3:
            nodes.append(PolyConvexFn(((0.0, 0.0),), Interval(xhat - 0.5, xhat)))
            atoms.append((j, _lattice(rng, 0.25, 1.0, 0.25)))
        else:
            nodes.append(PolyConvexFn(((0.0, 0.0),), Interval(xhat - 0.5, xhat + 0.5)))
    h = IntegrandField(cpx, tuple(cells), tuple(nodes))
    y = PLFunction.constant(cpx, xhat)
    theta = SignedMeasure(base, tuple(dens), tuple(atoms))
    return h, base, y, theta


def mu_continuous_map(rng: Random, cpx: CellComplex) -> IntervalMap:
    """Tube whose node values equal one of the one-sided limits."""
    m = rand_tube(rng, cpx, shrink_nodes=False)
    node_values = list(m.node_values)
    for i in range(cpx.n_nodes):
        t = cpx.nodes[i]
        if 0 < i and (i == cpx.n_nodes - 1 or rng.random() < 0.5):
            node_values[i] = m.cell_interval_at(i - 1, t)
        else:
            node_values[i] = m.cell_interval_at(i, t)
    return IntervalMap(cpx, m.cells, tuple(node_values))


def tau_full_map(rng: Random, cpx: CellComplex) -> IntervalMap:
    """Tube whose node values contain the two-sided inner limit (possibly
    inflated), which passes the two-stage fullness check."""
    m = rand_tube(rng, cpx, shrink_nodes=False)
    node_values = list(m.node_values)
    for i in range(cpx.n_nodes):
        t = cpx.nodes[i]
        left = m.cell_interval_at(i - 1, t) if i > 0 else None
        right = m.cell_interval_at(i, t) if i < cpx.n_nodes - 1 else None
        if left is None:
            iv = right
        elif right is None:
            iv = left
        else:
            iv = left.intersect(right)
        pad = _lattice(rng, 0.0, 0.5, 0.25)
        node_values[i] = Interval(iv.lo - pad, iv.hi + pad)
    return IntervalMap(cpx, m.cells, tuple(node_values))


def rand_mu_selection(rng: Random, m: IntervalMap) -> PLFunction:
    """Random PL function lying in the bands almost everywhere (node values
    of the map are ignored, as a mu-a.e. selection may)."""
    cpx = m.complex
    values = []
    for i in range(cpx.n_nodes):
        t = cpx.nodes[i]
        g = None
        for cell in (i - 1, i):
            if 0 <= cell < cpx.n_cells:
                iv = m.cell_interval_at(cell, t)
                g = iv if g is None else g.intersect(iv)
        values.append(g.lo + rng.random() * (g.hi - g.lo))
    return PLFunction(cpx, tuple(values))
