"""Integral functionals of continuous functions and their measure-space duals.

The integrand field assigns a polyhedral convex function to every open cell
(constant in the parameter on the cell, optionally divided by the distance to
a designated cell endpoint) and to every node.  This module evaluates the
primal integral functional exactly (breakpoint integration, log-exact on
weighted cells), evaluates the dual functional on measures exactly (cell
conjugates plus recession terms on atoms), and runs the discretized duality
experiments: support-function values, the discretized conjugate as a
separable epigraph LP, brute-force oracles, pointwise subdifferential
verification, and properness witnesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from .convex import (
    INF,
    Interval,
    PolyConvexFn,
    breakpoints,
    canonicalize,
    conjugate,
    eval_fn,
    ext_sum,
    normal_cone,
    scale,
    subdifferential,
    support_function,
    zero_sublevel,
)
from .errors import BudgetError, InfeasibleError, SchemaError
from .measures import BaseMeasure, SignedMeasure, pair
from .plfun import PLFunction
from .setmap import CellComplex, IntervalMap, CellBand, feasible_node_boxes, michael_selection

# Absolute slack for membership/zero tests on closed-form quantities.
ZTOL = 1e-12


@dataclass(frozen=True)
class CellIntegrand:
    """Integrand on one open cell: ``fn`` (unit weight) or ``fn/|t - pole|``.

    A weighted cell requires ``fn >= 0`` with minimum value 0 attained, and
    the pole may not lie inside the open cell.
    """

    fn: PolyConvexFn
    pole: float | None = None


@dataclass(frozen=True)
class IntegrandField:
    complex: CellComplex
    cells: tuple[CellIntegrand, ...]
    nodes: tuple[PolyConvexFn, ...]

    def __post_init__(self):
        if len(self.cells) != self.complex.n_cells:
            raise SchemaError("cell integrand count mismatch")
        if len(self.nodes) != self.complex.n_nodes:
            raise SchemaError("node integrand count mismatch")
        for i, ci in enumerate(self.cells):
            if ci.pole is None:
                continue
            c, d = self.complex.cell(i)
            if c < ci.pole < d:
                raise SchemaError("pole inside the open cell")
            from .convex import infimum

            m = infimum(ci.fn)
            if abs(m) > 1e-9:
                raise SchemaError("weighted cell integrand must have minimum 0")

    @staticmethod
    def uniform(complex_: CellComplex, fn: PolyConvexFn) -> "IntegrandField":
        return IntegrandField(
            complex_,
            tuple(CellIntegrand(fn) for _ in range(complex_.n_cells)),
            tuple(fn for _ in range(complex_.n_nodes)),
        )

    def refined(self, per_cell: int) -> "IntegrandField":
        """Same field on the subdivided complex.

        Weighted subcells keep the original pole; interior nodes inherit the
        parameter-pointwise integrand (the scaled base on weighted cells),
        which preserves the node domains used by the singular dual terms.
        """
        fine = self.complex.refined(per_cell)
        cells: list[CellIntegrand] = []
        nodes: list[PolyConvexFn] = []
        for i in range(self.complex.n_cells):
            ci = self.cells[i]
            nodes.append(self.nodes[i])
            for j in range(per_cell):
                cells.append(ci)
                if j < per_cell - 1:
                    t = fine.nodes[i * per_cell + j + 1]
                    if ci.pole is None:
                        nodes.append(ci.fn)
                    else:
                        nodes.append(scale(ci.fn, 1.0 / abs(t - ci.pole)))
        nodes.append(self.nodes[-1])
        return IntegrandField(fine, tuple(cells), tuple(nodes))


def domain_map(h: IntegrandField) -> IntervalMap:
    """Closure of the integrand domains: constant band per cell, node overrides."""
    cells = tuple(CellBand.constant(ci.fn.dom) for ci in h.cells)
    nodes = tuple(fn.dom for fn in h.nodes)
    return IntervalMap(h.complex, cells, nodes)


def _eval_near(fn: PolyConvexFn, x: float) -> float:
    """Evaluate with rounding slack: points within ZTOL of the domain count."""
    if fn.dom.contains(x):
        return eval_fn(fn, x)
    if fn.dom.contains(x, ZTOL):
        return eval_fn(fn, fn.dom.clamp(x))
    return INF


def _composition_breaks(fn: PolyConvexFn, c: float, d: float, yl: float, yr: float):
    """Partition of [c, d] where t -> fn(y(t)) is affine (y affine on the cell)."""
    ts = [c]
    if yl != yr:
        for x in breakpoints(fn):
            if min(yl, yr) < x < max(yl, yr):
                ts.append(c + (d - c) * (x - yl) / (yr - yl))
    ts.append(d)
    return sorted(ts)


def _cell_integral(
    ci: CellIntegrand, c: float, d: float, yl: float, yr: float, mu_density: float
) -> float:
    """Exact integral of the (possibly weighted) integrand along the segment.

    Unit cells integrate a piecewise-linear composition in closed form.
    Weighted cells integrate PL/|t - pole| with linear-plus-log
    antiderivatives; finiteness at an endpoint pole requires the composition
    to vanish there.
    """
    fn = ci.fn
    if not (fn.dom.contains(yl, ZTOL) and fn.dom.contains(yr, ZTOL)):
        return INF

    def yval(t: float) -> float:
        if t == c:
            return yl
        if t == d:
            return yr
        return yl + (yr - yl) * (t - c) / (d - c)

    ts = _composition_breaks(fn, c, d, yl, yr)
    if ci.pole is None:
        total = 0.0
        for t0, t1 in zip(ts, ts[1:]):
            g0 = _eval_near(fn, yval(t0))
            g1 = _eval_near(fn, yval(t1))
            total += 0.5 * (g0 + g1) * (t1 - t0)
        return mu_density * total
    p = ci.pole
    if p == c or p == d:
        if abs(_eval_near(fn, yval(p))) > ZTOL:
            return INF
    total = 0.0
    for t0, t1 in zip(ts, ts[1:]):
        g0 = _eval_near(fn, yval(t0))
        g1 = _eval_near(fn, yval(t1))
        beta = (g1 - g0) / (t1 - t0)
        kappa = g0 + (p - t0) * beta  # composition extended to the pole
        if p <= c:
            if t0 == p:
                total += beta * (t1 - t0)
            else:
                total += beta * (t1 - t0) + kappa * math.log((t1 - p) / (t0 - p))
        else:
            if t1 == p:
                total += -beta * (t1 - t0)
            else:
                total += -beta * (t1 - t0) + kappa * math.log((p - t0) / (p - t1))
    return mu_density * total


def eval_Ih(h: IntegrandField, y: PLFunction, mu: BaseMeasure) -> float:
    """Exact value of the integral functional at a PL function (may be +inf)."""
    if y.complex.nodes != h.complex.nodes or mu.complex.nodes != h.complex.nodes:
        raise SchemaError("integrand, function and measure must share a complex")
    total = 0.0
    for i in range(h.complex.n_cells):
        c, d = h.complex.cell(i)
        v = _cell_integral(h.cells[i], c, d, y.values[i], y.values[i + 1], mu.densities[i])
        if v == INF:
            return INF
        total += v
    return total


def eval_Ih_window(
    h: IntegrandField, y: PLFunction, mu: BaseMeasure, node_index: int
) -> float:
    """Integral restricted to the half-cells around one node (a true
    neighborhood of the node that excludes all other nodes)."""
    total = 0.0
    t = h.complex.nodes[node_index]
    for i in (node_index - 1, node_index):
        if i < 0 or i >= h.complex.n_cells:
            continue
        c, d = h.complex.cell(i)
        mid = 0.5 * (c + d)
        lo, hi_ = (mid, d) if i == node_index - 1 else (c, mid)
        ylo = y(lo) if lo != t else y.values[node_index]
        yhi = y(hi_) if hi_ != t else y.values[node_index]
        ci = h.cells[i]
        if ci.pole is not None and not (ci.pole <= lo or ci.pole >= hi_):
            raise SchemaError("pole inside the window interior")
        v = _cell_integral(ci, lo, hi_, ylo, yhi, mu.densities[i])
        if v == INF:
            return INF
        total += v
    return total


def _conjugate_cached(cache: dict, fn: PolyConvexFn) -> PolyConvexFn:
    key = id(fn)
    if key not in cache:
        cache[key] = conjugate(fn)
    return cache[key]


def _weighted_dual_cell(fn: PolyConvexFn, pole: float, c: float, d: float, rho: float) -> float:
    """Integral over the cell of the conjugate of fn/|t-pole| at constant rho.

    With s = |t - pole|, the pointwise conjugate is fnstar(rho*s)/s, a
    piecewise (affine + log) expression in s integrated in closed form.
    """
    if rho == 0.0:
        return 0.0
    fs = conjugate(fn)
    if rho > 0:
        dom_s = Interval(fs.dom.lo / rho, fs.dom.hi / rho)
    else:
        dom_s = Interval(fs.dom.hi / rho, fs.dom.lo / rho)
    s0, s1 = sorted((abs(c - pole), abs(d - pole)))
    if not Interval(s0, s1).subset_of(dom_s, ZTOL):
        return INF
    psi = canonicalize(
        PolyConvexFn(tuple((a * rho, b) for a, b in fs.pieces), Interval.real_line())
    )
    ss = [s0]
    for x in breakpoints(psi):
        if s0 < x < s1:
            ss.append(x)
    ss.append(s1)
    ss = sorted(ss)
    total = 0.0
    for p, q in zip(ss, ss[1:]):
        v0 = eval_fn(psi, p)
        v1 = eval_fn(psi, q)
        slope = (v1 - v0) / (q - p)
        icept = v0 - slope * p
        if p == 0.0:
            if abs(icept) > ZTOL:
                return INF
            total += slope * (q - p)
        else:
            total += slope * (q - p) + icept * math.log(q / p)
    return total


def eval_J(h: IntegrandField, theta: SignedMeasure) -> float:
    """Dual functional on measures: density part through the cell conjugates,
    atoms through the support function of the node domain (the recession
    function of the node conjugate)."""
    if theta.complex.nodes != h.complex.nodes:
        raise SchemaError("integrand and measure must share a complex")
    cache: dict = {}
    total = 0.0
    for i in range(h.complex.n_cells):
        ci = h.cells[i]
        rho = theta.densities[i]
        c, d = h.complex.cell(i)
        if ci.pole is None:
            val = eval_fn(_conjugate_cached(cache, ci.fn), rho)
            if val == INF:
                return INF
            total += val * theta.base.cell_mass(i)
        else:
            val = _weighted_dual_cell(ci.fn, ci.pole, c, d, rho)
            if val == INF:
                return INF
            total += val * theta.base.densities[i]
    for j, w in theta.atoms:
        sigma = support_function(h.nodes[j].dom)
        val = eval_fn(sigma, math.copysign(1.0, w))
        if val == INF:
            return INF
        total += abs(w) * val
    return total


def recession_singular_term(h: IntegrandField, theta: SignedMeasure) -> float:
    """Atom part of the dual functional alone (used by cross-checks)."""
    total = 0.0
    for j, w in theta.atoms:
        sigma = support_function(h.nodes[j].dom)
        val = eval_fn(sigma, math.copysign(1.0, w))
        if val == INF:
            return INF
        total += abs(w) * val
    return total


# ---------------------------------------------------------------------------
# Discretized suprema (support values and the discretized conjugate)
# ---------------------------------------------------------------------------


def _measure_on(fine: CellComplex, theta: SignedMeasure) -> SignedMeasure:
    """Transfer a measure to a complex refined at extra interior points."""
    old = theta.complex
    parent = [old.cell_of(0.5 * (fine.nodes[j] + fine.nodes[j + 1])) for j in range(fine.n_cells)]
    base = BaseMeasure(fine, tuple(theta.base.densities[i] for i in parent))
    dens = tuple(theta.densities[i] for i in parent)
    atoms = tuple((fine.nodes.index(old.nodes[j]), w) for j, w in theta.atoms)
    return SignedMeasure(base, dens, atoms)


def _pair_coefficients(theta: SignedMeasure) -> np.ndarray:
    """Gradient of y -> pair(y, theta) with respect to the node values."""
    cpx = theta.complex
    n = cpx.n_nodes
    c = np.zeros(n)
    nodes = np.asarray(cpx.nodes)
    dt = np.diff(nodes)
    rho = np.asarray(theta.densities) * np.asarray(theta.base.densities)
    w = 0.5 * rho * dt
    c[:-1] += w
    c[1:] += w
    for j, wt in theta.atoms:
        c[j] += wt
    return c


def sigma_CS(s, theta: SignedMeasure, refinement: int) -> tuple[float, float]:
    """(lp_value, formula_value) for the support function of the continuous
    selections of ``s`` at ``theta``.

    lp_value maximizes the pairing over PL selections on the refined complex
    (a box LP after imposing the affine bounds at cell endpoints); the
    formula value integrates the pointwise support function against the
    variation measure in closed form.  lp <= formula always; they agree in
    the refinement limit exactly when the map is inner semicontinuous.
    """
    from .setmap import as_union, hull_map

    u = as_union(s)
    if u.complex.nodes != theta.complex.nodes:
        raise SchemaError("map and measure must share a complex")
    m = hull_map(u) if len(u.branches) > 1 else u.branches[0]
    if m.complex.nodes != theta.complex.nodes:
        # the hull split cells at branch crossings; carry the measure over
        theta = _measure_on(m.complex, theta)
    michael_selection(m)  # raises when C(S) is empty

    mr = m.refined(refinement)
    tr = theta.refined(refinement)
    boxes = feasible_node_boxes(mr)
    lo = np.array([g.lo for g in boxes])
    hi = np.array([g.hi for g in boxes])
    if np.any(lo > hi):
        raise InfeasibleError("selection constraints infeasible after refinement")
    c = _pair_coefficients(tr)
    if np.any((c > 0) & np.isinf(hi)) or np.any((c < 0) & np.isinf(lo)):
        lp = INF
    else:
        y = np.where(c > 0, hi, np.where(c < 0, lo, np.clip(0.0, lo, hi)))
        lp = float(np.sum(c * y))

    formula = 0.0
    for i in range(m.complex.n_cells):
        rho = theta.densities[i]
        if rho == 0.0:
            continue
        band = m.cells[i]
        if band is None:
            raise SchemaError("support formula needs a nonempty-valued map")
        cmass = theta.base.cell_mass(i)
        if rho > 0:
            if math.isinf(band.u_left):
                return lp, INF
            formula += rho * cmass * 0.5 * (band.u_left + band.u_right)
        else:
            if math.isinf(band.l_left):
                return lp, INF
            formula += rho * cmass * 0.5 * (band.l_left + band.l_right)
    for j, w in theta.atoms:
        iv = m.node_values[j]
        if iv.is_empty:
            raise SchemaError("support formula needs a nonempty-valued map")
        val = eval_fn(support_function(iv), math.copysign(1.0, w))
        if val == INF:
            return lp, INF
        formula += abs(w) * val
    return lp, formula


def _pole_constraints(h: IntegrandField) -> dict[int, Interval]:
    """Hard node constraints forcing the weighted compositions to vanish at
    endpoint poles (the finite-integral requirement)."""
    out: dict[int, Interval] = {}
    nodes = h.complex.nodes
    for i, ci in enumerate(h.cells):
        if ci.pole is None:
            continue
        for idx in (i, i + 1):
            if nodes[idx] == ci.pole:
                z = zero_sublevel(ci.fn)
                if idx in out:
                    z = out[idx].intersect(z)
                out[idx] = z
    return out


def _primal_assembly(h: IntegrandField, theta: SignedMeasure):
    """Feasible boxes, pairing coefficients and epigraph terms for the
    discretized conjugate on the complex of ``h`` (already refined)."""
    d_map = domain_map(h)
    boxes = feasible_node_boxes(d_map, _pole_constraints(h))
    for i, g in enumerate(boxes):
        if g.is_empty:
            raise InfeasibleError(f"domain constraints infeasible at node {i}", node=i)
    c = _pair_coefficients(theta)
    terms: list[list[tuple[float, PolyConvexFn]]] = [[] for _ in range(h.complex.n_nodes)]
    nodes = h.complex.nodes
    for i, ci in enumerate(h.cells):
        cl, dl = h.complex.cell(i)
        mu_d = theta.base.densities[i]
        if ci.pole is None:
            w = 0.5 * mu_d * (dl - cl)
            terms[i].append((w, ci.fn))
            terms[i + 1].append((w, ci.fn))
        else:
            p = ci.pole
            length = dl - cl
            if p == cl:
                wl, wr = 0.0, mu_d
            elif p == dl:
                wl, wr = mu_d, 0.0
            elif p < cl:
                r = (dl - p) / (cl - p)
                wl = mu_d * ((dl - p) * math.log(r) - length) / length
                wr = mu_d * (length - (cl - p) * math.log(r)) / length
            else:
                r = (p - cl) / (p - dl)
                wl = mu_d * (length - (p - dl) * math.log(r)) / length
                wr = mu_d * ((p - cl) * math.log(r) - length) / length
            if wl > 0.0:
                terms[i].append((wl, ci.fn))
            if wr > 0.0:
                terms[i + 1].append((wr, ci.fn))
    return boxes, c, terms


def _solve_separable(boxes, c, terms) -> tuple[float, PLFunction | None, np.ndarray]:
    """Run the per-node epigraph solves and combine (kernel-backed)."""
    n = len(boxes)
    lo = np.array([g.lo for g in boxes])
    hi = np.array([g.hi for g in boxes])
    canon_cache: dict = {}

    term_ptr = [0]
    term_w: list[float] = []
    piece_ptr = [0]
    pa: list[float] = []
    pb: list[float] = []
    for i in range(n):
        for w, fn in terms[i]:
            key = id(fn)
            if key not in canon_cache:
                canon_cache[key] = canonicalize(fn)
            cf = canon_cache[key]
            term_w.append(w)
            for a, b in cf.pieces:
                pa.append(a)
                pb.append(b)
            piece_ptr.append(len(pa))
        term_ptr.append(len(term_w))
    vals, ys = kernels.node_lp_batch(
        np.asarray(c, dtype=np.float64),
        lo,
        hi,
        np.asarray(term_ptr, dtype=np.int64),
        np.asarray(term_w, dtype=np.float64),
        np.asarray(piece_ptr, dtype=np.int64),
        np.asarray(pa, dtype=np.float64),
        np.asarray(pb, dtype=np.float64),
    )
    if np.any(np.isinf(vals)):
        return INF, None, vals
    return float(np.sum(vals)), ys, vals


def primal_conjugate(h: IntegrandField, theta: SignedMeasure, refinement: int) -> float:
    """Discretized conjugate value: maximum of pair(y, theta) - Ihat(y) over
    PL functions on the refined complex with node values in the domain map.

    Ihat is the per-cell chord (trapezoidal) upper model of the integral, so
    the objective is separable and each node solves a tiny bounded epigraph
    problem exactly; the result underestimates the true conjugate and is
    nondecreasing under nested refinement.
    """
    if theta.complex.nodes != h.complex.nodes:
        raise SchemaError("integrand and measure must share a complex")
    hr = h.refined(refinement) if refinement > 1 else h
    tr = theta.refined(refinement) if refinement > 1 else theta
    boxes, c, terms = _primal_assembly(hr, tr)
    value, _, _ = _solve_separable(boxes, c, terms)
    return value


def brute_force_primal(
    h: IntegrandField,
    theta: SignedMeasure,
    value_grid: tuple[float, float, int],
) -> float:
    """Exhaustive oracle for the discretized conjugate on the unrefined complex.

    Enumerates every node-value tuple on the grid (respecting the domain
    boxes) and maximizes the same separable objective.  Budget: at most 6
    nodes and 41 grid steps.
    """
    glo, ghi, steps = value_grid
    n = h.complex.n_nodes
    if n > 6:
        raise BudgetError("brute force limited to 6 nodes")
    if steps > 41 or steps < 2:
        raise BudgetError("brute force limited to 2..41 grid steps")
    if theta.complex.nodes != h.complex.nodes:
        raise SchemaError("integrand and measure must share a complex")
    boxes, c, terms = _primal_assembly(h, theta)
    grid = [glo + k * (ghi - glo) / (steps - 1) for k in range(steps)]
    ptr = [0]
    vals: list[float] = []
    for i in range(n):
        for g in grid:
            if not boxes[i].contains(g, ZTOL):
                vals.append(-INF)
                continue
            v = c[i] * g
            for w, fn in terms[i]:
                v -= w * eval_fn(canonicalize(fn), g)
            vals.append(v)
        ptr.append(len(vals))
    return float(
        kernels.product_table_max(
            np.asarray(ptr, dtype=np.int64), np.asarray(vals, dtype=np.float64)
        )
    )


# ---------------------------------------------------------------------------
# Duality experiment and pointwise verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualityReport:
    refinements: tuple[int, ...]
    primal: tuple[float, ...]
    j_value: float
    gaps: tuple[float, ...]
    monotone: bool
    isc: bool
    isc_violations: tuple[int, ...]
    closure_ok: bool
    closure_witness: str | None
    proper: bool


def duality_gap(h: IntegrandField, theta: SignedMeasure, refinements) -> DualityReport:
    """Refinement study of the discretized conjugate against the dual value,
    with the two regularity diagnostics that govern whether the gap closes."""
    from .regularity import check_closure_condition
    from .setmap import is_isc

    primal = []
    for r in refinements:
        try:
            primal.append(primal_conjugate(h, theta, r))
        except InfeasibleError:
            primal.append(-INF)
    j = eval_J(h, theta)
    gaps = []
    for p in primal:
        if j == INF and p == INF:
            gaps.append(0.0)
        else:
            gaps.append(ext_sum((j, -p)))
    monotone = all(
        primal[k + 1] >= primal[k] - 1e-12 for k in range(len(primal) - 1)
    )
    ok_isc, viol = is_isc(domain_map(h))
    closure = check_closure_condition(h, theta.base, refinement=1)
    prop = check_proper(h, theta.base)
    return DualityReport(
        refinements=tuple(refinements),
        primal=tuple(primal),
        j_value=j,
        gaps=tuple(gaps),
        monotone=monotone,
        isc=ok_isc,
        isc_violations=viol,
        closure_ok=closure.ok,
        closure_witness=closure.witness,
        proper=prop.proper,
    )


@dataclass(frozen=True)
class SdReport:
    """Outcome of the pointwise subdifferential verification."""

    ok: bool
    in_domain: bool
    cell_ok: tuple[bool, ...]
    atom_ok: tuple[bool, ...]
    max_pointwise_gap: float
    fenchel_gap: float


def _cell_sd_gap(
    ci: CellIntegrand, c: float, d: float, yl: float, yr: float, rho: float
) -> float:
    """Max over sample points of the pointwise Fenchel gap on one cell.

    On each affine segment the gap is a nonnegative polynomial of degree at
    most two, so vanishing at both endpoints and the midpoint of every
    segment certifies vanishing almost everywhere (exactly).
    """
    fn = ci.fn
    if not (fn.dom.contains(yl, ZTOL) and fn.dom.contains(yr, ZTOL)):
        return INF

    def yval(t: float) -> float:
        if t == c:
            return yl
        if t == d:
            return yr
        return yl + (yr - yl) * (t - c) / (d - c)

    ts = set(_composition_breaks(fn, c, d, yl, yr))
    if ci.pole is None:
        fstar = conjugate(fn)
        fsr = eval_fn(fstar, rho)
        if fsr == INF:
            return INF

        def gap(t: float) -> float:
            return _eval_near(fn, yval(t)) + fsr - rho * yval(t)

    else:
        p = ci.pole
        fstar = conjugate(fn)
        # segment the cell where base*(rho*s(t)) changes pieces
        for x in breakpoints(fstar):
            if rho != 0.0:
                s = x / rho
                t = p + s if p <= c else p - s
                if c < t < d:
                    ts.add(t)

        def gap(t: float) -> float:
            s = abs(t - p)
            val = eval_fn(fstar, rho * s)
            if val == INF:
                return INF
            return _eval_near(fn, yval(t)) + val - rho * s * yval(t)

    pts = sorted(ts)
    samples = []
    for t0, t1 in zip(pts, pts[1:]):
        samples.extend((t0, 0.5 * (t0 + t1), t1))
    return max(gap(t) for t in samples)


def check_sd(h: IntegrandField, y: PLFunction, theta: SignedMeasure, tol: float = 1e-10) -> SdReport:
    """Verify the pointwise subdifferential characterization of optimality:
    cell densities must be subgradients of the cell integrands along y
    (almost everywhere), and atom signs must be normals of the node domains;
    cross-checked against the functional Fenchel gap."""
    if y.complex.nodes != h.complex.nodes or theta.complex.nodes != h.complex.nodes:
        raise SchemaError("inputs must share a complex")
    in_domain = all(
        h.nodes[j].dom.contains(y.values[j], ZTOL) for j in range(h.complex.n_nodes)
    )
    cell_ok = []
    worst = 0.0
    for i in range(h.complex.n_cells):
        c, d = h.complex.cell(i)
        g = _cell_sd_gap(h.cells[i], c, d, y.values[i], y.values[i + 1], theta.densities[i])
        cell_ok.append(g <= tol)
        worst = max(worst, g)
    atom_ok = []
    for j, w in theta.atoms:
        cone = normal_cone(h.nodes[j].dom, y.values[j])
        atom_ok.append(cone.contains(math.copysign(1.0, w)))
    ih = eval_Ih(h, y, theta.base)
    jv = eval_J(h, theta)
    if not in_domain:
        ih = INF
    fgap = ext_sum((ih, jv, -pair(y, theta)))
    ok = in_domain and all(cell_ok) and all(atom_ok)
    return SdReport(
        ok=ok,
        in_domain=in_domain,
        cell_ok=tuple(cell_ok),
        atom_ok=tuple(atom_ok),
        max_pointwise_gap=worst,
        fenchel_gap=fgap,
    )


@dataclass(frozen=True)
class Properness:
    proper: bool
    ybar: PLFunction | None
    xbar: tuple[float, ...] | None
    alpha: float | None
    reason: str | None


def check_proper(h: IntegrandField, mu: BaseMeasure) -> Properness:
    """Witnesses making both functionals proper: a continuous selection of
    the domain map with finite integral, a cellwise subgradient selection
    with finite dual value, and the common affine-minorant bound."""
    try:
        ybar = michael_selection(domain_map(h), node_constraints=_pole_constraints(h))
    except InfeasibleError as e:
        return Properness(False, None, None, None, f"no admissible selection (node {e.node})")
    if eval_Ih(h, ybar, mu) == INF:
        return Properness(False, None, None, None, "selection has infinite integral")
    xbar = []
    alpha = 0.0
    for i in range(h.complex.n_cells):
        ci = h.cells[i]
        c, d = h.complex.cell(i)
        yl, yr = ybar.values[i], ybar.values[i + 1]
        if ci.pole is None:
            sub = subdifferential(ci.fn, ci.fn.dom.clamp(0.5 * (yl + yr)))
            x = sub.pick() if not sub.is_empty else 0.0
            xbar.append(x)
            alpha = max(alpha, _eval_near(ci.fn, yl), _eval_near(ci.fn, yr))
            alpha = max(alpha, eval_fn(conjugate(ci.fn), x))
        else:
            xbar.append(0.0)
            # sup of composition / distance over the cell, segment by segment
            ts = _composition_breaks(ci.fn, c, d, yl, yr)
            p = ci.pole
            for t0, t1 in zip(ts, ts[1:]):
                g0 = _eval_near(ci.fn, ybar(t0) if t0 not in (c, d) else (yl if t0 == c else yr))
                g1 = _eval_near(ci.fn, ybar(t1) if t1 not in (c, d) else (yl if t1 == c else yr))
                beta = (g1 - g0) / (t1 - t0)
                for t, g in ((t0, g0), (t1, g1)):
                    s = abs(t - p)
                    if s == 0.0:
                        alpha = max(alpha, abs(beta))
                    else:
                        alpha = max(alpha, g / s)
    return Properness(True, ybar, tuple(xbar), alpha, None)
