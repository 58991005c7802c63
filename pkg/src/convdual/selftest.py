"""Seeded self-test: runs every module's property corpus deterministically.

Each section generates a fixed-count corpus from the seed, checks the module
invariants, and prints one line.  Output is byte-reproducible for a given
seed; the first failure dumps a reproducer file and the run exits nonzero.
"""

from __future__ import annotations

import json
import sys
from random import Random

import numpy as np

from . import convex as cx
from . import corpus
from .convex import Interval, PolyConvexFn, eval_fn, fn_equal
from .errors import InfeasibleError
from .fixtures import REGULAR_SUITE, load_fixture
from .functionals import (
    brute_force_primal,
    check_proper,
    check_sd,
    domain_map,
    duality_gap,
    eval_Ih,
    eval_J,
    primal_conjugate,
    sigma_CS,
)
from .measures import BaseMeasure, SignedMeasure, lebesgue_decompose, pair, total_variation
from .plfun import PLFunction
from .regularity import (
    check_closure_condition,
    check_ic_condition,
    is_full_lsc,
    is_mu_continuous,
    is_outer_mu_regular,
    is_tau_full,
    mu_selection_check,
)
from .setmap import (
    CellComplex,
    IntervalMap,
    affine_map,
    box_is_isc,
    hull_map,
    image_closure,
    intersect_map,
    is_isc,
    kuratowski_limits,
    michael_selection,
    product_map,
    sum_map,
    union_map,
)

BF_GRIDS = {
    "reg01": (0.0, 1.0, 33),
    "reg02": (-1.0, 1.0, 33),
    "reg03": (-0.5, 0.5, 33),
    "reg04": (-1.0, 1.0, 33),
    "reg05": (0.0, 1.0, 33),
    "reg06": (0.0, 1.0, 33),
    "reg07": (0.0, 1.0, 33),
    "reg08": (-1.0, 1.0, 33),
    "reg09": (0.0, 1.0, 33),
    "reg10": (-0.5, 1.0, 33),
}


class _Failure(Exception):
    def __init__(self, section: str, message: str, payload=None):
        super().__init__(message)
        self.section = section
        self.payload = payload


def _require(cond: bool, section: str, message: str, payload=None):
    if not cond:
        raise _Failure(section, message, payload)


def _sample_points(f: PolyConvexFn, n: int = 9) -> list[float]:
    lo = f.dom.lo if f.dom.lo > -cx.INF else -3.0
    hi = f.dom.hi if f.dom.hi < cx.INF else 3.0
    if lo == hi:
        return [lo]
    return [lo + k * (hi - lo) / (n - 1) for k in range(n)]


def _check_convex_core(rng: Random, n: int, out) -> None:
    section = "convex-core"
    for _ in range(n):
        f = corpus.rand_polyconvex(rng)
        g = cx.conjugate(f)
        _require(
            fn_equal(cx.conjugate(g), cx.canonicalize(f), 1e-12),
            section,
            f"biconjugation mismatch for {f}",
        )
        _require(
            fn_equal(cx.recession(f), cx.support_function(g.dom), 1e-12),
            section,
            f"recession/support mismatch for {f}",
        )
        for x in _sample_points(f, 5):
            for v in _sample_points(g, 5):
                lhs = eval_fn(f, x) + eval_fn(g, v)
                _require(lhs >= x * v - 1e-9, section, f"Fenchel inequality fails ({f})")
        for x in cx.breakpoints(f):
            sub = cx.subdifferential(f, x)
            for v in (sub.lo, sub.pick(), sub.hi):
                if not np.isfinite(v):
                    continue
                gap = eval_fn(f, x) + eval_fn(g, v) - x * v
                _require(abs(gap) <= 1e-9, section, f"subgradient equality fails ({f})")
        eps_abs = cx.abs_fn()
        prev = None
        for eps in (0.1, 0.5, 1.0):
            reg = cx.epsilon_regularize(f, eps)
            lhs_fn = cx.conjugate(reg)
            rhs_fn = cx.add(g, cx.scale(eps_abs, eps))
            for v in _sample_points(rhs_fn, 9):
                a, b = eval_fn(lhs_fn, v), eval_fn(rhs_fn, v)
                if a == cx.INF and b == cx.INF:
                    continue
                _require(abs(a - b) <= 1e-9, section, f"eps-identity fails ({f}, {eps})")
            if prev is not None:
                for x in _sample_points(reg, 7):
                    _require(
                        eval_fn(reg, x) <= eval_fn(prev, x) + 1e-9,
                        section,
                        f"eps-monotonicity fails ({f})",
                    )
            prev = reg
    out.write(f"convex-core: {n} functions PASS\n")


def _check_setmap(rng: Random, n: int, out) -> None:
    section = "setmap"
    n_sel = 0
    for _ in range(n):
        cpx = corpus.rand_complex(rng)
        s = corpus.rand_isc_union(rng, cpx)
        _require(is_isc(s)[0], section, "generator produced a non-isc map", s)
        results = [
            affine_map(s, -2.0, 0.25),
            hull_map(s),
            sum_map(s, corpus.rand_isc_union(rng, cpx)),
            union_map(s, corpus.rand_isc_union(rng, cpx)),
        ]
        for r in results:
            _require(is_isc(r)[0], section, "operation broke inner semicontinuity", r)
        tube = corpus.rand_tube(rng, cpx)
        wide = corpus.margin_tube(tube, 2.0)
        tight = corpus.margin_tube(tube, 0.25)
        for other in (wide, tight):
            r = intersect_map(tube, other)
            _require(is_isc(r)[0], section, "intersection broke inner semicontinuity", r)
        box = product_map(s, corpus.rand_isc_union(rng, cpx))
        _require(box_is_isc(box)[0], section, "box product broke inner semicontinuity")
        _require(
            is_isc(s)[0] == is_isc(image_closure(s))[0],
            section,
            "image closure changed the isc verdict",
        )
        for i in range(cpx.n_nodes):
            liminf, limsup = kuratowski_limits(s, i)
            _require(liminf.subset_of(limsup), section, "liminf exceeds limsup")
        try:
            y = michael_selection(s)
            n_sel += 1
            m = hull_map(s)
            for i, t in enumerate(m.complex.nodes):
                _require(
                    m.node_values[i].contains(y(t), 1e-9),
                    section,
                    "selection leaves a node value",
                )
            for ci in range(m.complex.n_cells):
                c, d = m.complex.cell(ci)
                for k in range(1, 100):
                    t = c + k * (d - c) / 100
                    iv = m.cell_interval_at(ci, t)
                    _require(iv.contains(y(t), 1e-9), section, "selection leaves a band")
        except InfeasibleError:
            pass
    out.write(f"setmap: {n} maps, {n_sel} selections PASS\n")


def _check_measures(rng: Random, n: int, out) -> None:
    section = "measures"
    for _ in range(n):
        cpx = corpus.rand_complex(rng)
        base = corpus.rand_base(rng, cpx)
        theta = corpus.rand_measure(rng, base)
        tv, _tvm = total_variation(theta)
        ac, sing = lebesgue_decompose(theta)
        y = PLFunction(cpx, tuple(corpus._lattice(rng, -1.0, 1.0, 0.25) for _ in cpx.nodes))
        _require(
            abs(pair(y, ac) + pair(y, sing) - pair(y, theta)) <= 1e-12,
            section,
            "decomposition does not recompose",
        )
        _require(
            abs(pair(y, theta)) <= y.sup_norm() * tv + 1e-12,
            section,
            "pairing bound violated",
        )
        # sign-pattern pairing on a grid refined near the sign changes
        eps = 1e-8
        extra = [cpx.nodes[0] + eps, cpx.nodes[-1] - eps]
        for t in cpx.nodes[1:-1]:
            extra.extend((t - eps, t + eps))
        fine = cpx.refined_at(extra)
        vals = []
        for t in fine.nodes:
            i = min(cpx.cell_of(t + eps if t < cpx.nodes[-1] else t), cpx.n_cells - 1)
            sgn = 1.0 if theta.densities[i] >= 0 else -1.0
            vals.append(sgn)
        for j, w in theta.atoms:
            t = cpx.nodes[j]
            k = fine.nodes.index(t)
            vals[k] = 1.0 if w > 0 else -1.0
        dens_fine = []
        for fi in range(fine.n_cells):
            mid = 0.5 * (fine.nodes[fi] + fine.nodes[fi + 1])
            dens_fine.append(cpx.cell_of(mid))
        theta_fine = SignedMeasure(
            BaseMeasure(fine, tuple(base.densities[i] for i in dens_fine)),
            tuple(theta.densities[i] for i in dens_fine),
            tuple((fine.nodes.index(cpx.nodes[j]), w) for j, w in theta.atoms),
        )
        approx = pair(PLFunction(fine, tuple(vals)), theta_fine)
        _require(tv - 1e-6 <= approx <= tv + 1e-9, section, "variation pairing limit fails")
    out.write(f"measures: {n} measures PASS\n")


def _check_functionals(rng: Random, out) -> None:
    section = "functionals"
    # support values on random isc tubes
    n_support = 10
    for _ in range(n_support):
        cpx = corpus.rand_complex(rng, max_cells=2)
        tube = corpus.rand_tube(rng, cpx, shrink_nodes=False)
        base = BaseMeasure.lebesgue(cpx)
        theta = corpus.rand_measure(rng, base)
        prev = -cx.INF
        for r in (64, 512, 4096):
            lp, formula = sigma_CS(tube, theta, r)
            _require(lp >= prev - 1e-12, section, "support values not monotone")
            _require(lp <= formula + 1e-9, section, "support value exceeds the formula")
            prev = lp
        _require(formula - lp <= 1e-3, section, "support gap did not close")
    # pinch counterexample: exact unit gap at every refinement
    p = load_fixture("pinch")
    for r in (64, 512, 4096):
        lp, formula = sigma_CS(p.maps["pinch"], p.measures["atom05"], r)
        _require(abs(formula - lp - 1.0) <= 1e-9, section, "pinch gap is not one")
    # duality suite
    for name in REGULAR_SUITE:
        prob = load_fixture(name)
        rep = duality_gap(prob.integrand, prob.measures["theta"], (8, 64, 512, 4096))
        _require(rep.monotone, section, f"{name}: primal not monotone")
        _require(rep.isc and rep.closure_ok and rep.proper, section, f"{name}: diagnostics")
        _require(abs(rep.gaps[-1]) <= 1e-3, section, f"{name}: gap {rep.gaps[-1]}")
        bf = brute_force_primal(prob.integrand, prob.measures["theta"], BF_GRIDS[name])
        p1 = primal_conjugate(prob.integrand, prob.measures["theta"], 1)
        _require(abs(bf - p1) <= 1e-9, section, f"{name}: oracle mismatch")
    # counterexample fixtures
    inv = load_fixture("invdist")
    rep = duality_gap(inv.integrand, inv.measures["theta"], (8, 64))
    _require(rep.j_value == cx.INF, section, "weighted counterexample: J must be +inf")
    _require(max(rep.primal) <= 1e-12, section, "weighted counterexample: primal > 0")
    _require(not rep.closure_ok, section, "weighted counterexample: closure must fail")
    _require(rep.isc, section, "weighted counterexample: domain map must be isc")
    non = load_fixture("nonisc")
    rep = duality_gap(non.integrand, non.measures["theta"], (8, 64))
    _require(not rep.isc, section, "non-isc fixture: must report isc=false")
    # recession route vs direct large-scale sampling on atom directions
    for _ in range(100):
        f = corpus.rand_polyconvex(rng)
        g = cx.conjugate(f)
        sigma = cx.support_function(f.dom)
        alpha = 2.0**40
        xbar = g.dom.pick()
        for d in (-1.0, 1.0):
            direct = eval_fn(g, xbar + alpha * d)
            via = eval_fn(sigma, d)
            if via == cx.INF:
                _require(direct == cx.INF, section, "recession sampling mismatch (inf)")
            else:
                sampled = (direct - eval_fn(g, xbar)) / alpha
                _require(abs(sampled - via) <= 1e-9, section, "recession sampling mismatch")
    # optimality pairs: pointwise check iff functional equality
    for _ in range(30):
        h, base, y, theta = corpus.optimal_pair(rng)
        rep = check_sd(h, y, theta)
        _require(rep.ok and rep.fenchel_gap <= 1e-8, section, "constructed pair fails")
        j = rng.randrange(h.complex.n_nodes)
        bad_y = y.with_value(j, y.values[j] + 0.1)
        rep_y = check_sd(h, bad_y, theta)
        _require(
            (not rep_y.ok) and rep_y.fenchel_gap > 1e-8,
            section,
            "node perturbation not detected",
        )
        i = rng.randrange(h.complex.n_cells)
        dens = list(theta.densities)
        dens[i] += 0.1
        rep_t = check_sd(h, y, SignedMeasure(base, tuple(dens), theta.atoms))
        _require(
            (not rep_t.ok) and rep_t.fenchel_gap > 1e-8,
            section,
            "density perturbation not detected",
        )
    # Fenchel inequality at the functional level on the regular suite
    for name in REGULAR_SUITE:
        prob = load_fixture(name)
        w = check_proper(prob.integrand, prob.base)
        _require(w.proper, section, f"{name}: expected proper")
        ih = eval_Ih(prob.integrand, w.ybar, prob.base)
        jv = eval_J(prob.integrand, prob.measures["theta"])
        _require(
            ih + jv >= pair(w.ybar, prob.measures["theta"]) - 1e-9,
            section,
            f"{name}: functional Fenchel inequality",
        )
    # biconjugation of the dual functional on a small instance, by brute force
    cpx = CellComplex((0.0, 0.5, 1.0))
    base = BaseMeasure.lebesgue(cpx)
    box = cx.indicator(Interval(0.0, 1.0))
    from .functionals import IntegrandField

    h = IntegrandField.uniform(cpx, box)
    grid = [round(-2.0 + 0.5 * k, 2) for k in range(9)]
    thetas = []
    for d1 in grid:
        for d2 in grid:
            thetas.append(SignedMeasure(base, (d1, d2)))
            for j in range(3):
                for w in grid:
                    if w != 0.0:
                        thetas.append(SignedMeasure(base, (d1, d2), ((j, w),)))
    for yv, expect in ((0.5, 0.0), (1.0, 0.0)):
        y = PLFunction.constant(cpx, yv)
        sup = max(pair(y, th) - eval_J(h, th) for th in thetas)
        _require(abs(sup - expect) <= 1e-3, section, "dual biconjugation (finite case)")
    y_out = PLFunction.constant(cpx, 1.5)
    sup = max(pair(y_out, th) - eval_J(h, th) for th in thetas)
    _require(sup >= 1.0 - 1e-9, section, "dual biconjugation (infeasible case)")
    out.write(
        f"functionals: {n_support} support maps, {len(REGULAR_SUITE)} duality fixtures, "
        f"100 recession samples, 30 optimality pairs PASS\n"
    )


def _check_regularity(rng: Random, n_pairs: int, out) -> None:
    section = "regularity"
    # a.e.-selection theorem corpus
    for k in range(n_pairs):
        cpx = corpus.rand_complex(rng)
        base = BaseMeasure.lebesgue(cpx)
        if k % 2 == 0:
            m = corpus.mu_continuous_map(rng, cpx)
            _require(is_mu_continuous(m, base)[0], section, "generator: not mu-continuous", m)
        else:
            m = corpus.tau_full_map(rng, cpx)
            _require(is_tau_full(m)[0], section, "generator: not tau-full", m)
        y = corpus.rand_mu_selection(rng, m)
        mu_sel, closure_sel = mu_selection_check(y, m, base)
        _require((not mu_sel) or closure_sel, section, "a.e. selection is not a selection", m)
    # canonical negative control
    cpx = CellComplex((0.0, 0.5, 1.0))
    base = BaseMeasure.lebesgue(cpx)
    pinch_down = IntervalMap.constant(cpx, Interval(0.0, 1.0)).with_node_value(
        1, Interval(0.0, 0.0)
    )
    flags = mu_selection_check(PLFunction.constant(cpx, 0.7), pinch_down, base)
    _require(flags == (True, False), section, "pinch-down control mismatch")
    # continuity implies outer regularity on single tubes
    for _ in range(300):
        cpx = corpus.rand_complex(rng)
        m = corpus.mu_continuous_map(rng, cpx)
        _require(is_outer_mu_regular(m)[0], section, "continuity without outer regularity", m)
    # solid maps passing the graph-interior check are two-stage full
    n_solid = 0
    for _ in range(200):
        cpx = corpus.rand_complex(rng)
        m = corpus.rand_tube(rng, cpx, solid=True, shrink_nodes=False)
        if rng.random() < 0.5:
            i = rng.randrange(cpx.n_nodes)
            v = m.node_values[i]
            m = m.with_node_value(i, Interval(v.lo, v.lo + 0.5 * (v.hi - v.lo)))
        if is_full_lsc(m)[0]:
            n_solid += 1
            _require(is_tau_full(m)[0], section, "full-lsc map fails two-stage fullness", m)
    # sufficiency of the local-integrability condition over the corpus
    n_ic = 0
    fields = [load_fixture(name).integrand for name in REGULAR_SUITE]
    fields.append(load_fixture("invdist").integrand)
    for _ in range(50):
        fields.append(corpus.rand_integrand_field(rng, corpus.rand_complex(rng)))
    for h in fields:
        base_h = BaseMeasure.lebesgue(h.complex)
        if not is_isc(domain_map(h))[0]:
            continue
        ic = check_ic_condition(h, base_h)
        if ic.ok:
            n_ic += 1
            _require(
                check_closure_condition(h, base_h).ok,
                section,
                "local integrability without closure",
            )
    out.write(
        f"regularity: {n_pairs} selection pairs, 300 continuity maps, "
        f"{n_solid} solid maps, {n_ic} integrable fields PASS\n"
    )


def run(seed: int, out=None) -> int:
    """Run the whole corpus; returns 0 on success, 4 on invariant failure."""
    out = out if out is not None else sys.stdout
    out.write(f"selftest seed={seed} backend={_backend()}\n")
    rng = Random(seed)
    try:
        _check_convex_core(Random(rng.getrandbits(64)), 500, out)
        _check_setmap(Random(rng.getrandbits(64)), 200, out)
        _check_measures(Random(rng.getrandbits(64)), 200, out)
        _check_functionals(Random(rng.getrandbits(64)), out)
        _check_regularity(Random(rng.getrandbits(64)), 1000, out)
    except _Failure as f:
        out.write(f"FAIL [{f.section}] {f}\n")
        path = "selftest_failure.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"section": f.section, "detail": repr(f.payload)}, fh, indent=1)
        out.write(f"reproducer written to {path}\n")
        return 4
    out.write("selftest PASS\n")
    return 0


def _backend() -> str:
    from . import _kernels

    return _kernels.BACKEND
