"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they
complete.  Tolerances are the contract values, pinned here and nowhere else.
"""

import io
import time
from random import Random

import numpy as np

from convdual import _kernels as kernels
from convdual.convex import (
    INF,
    Interval,
    abs_fn,
    add,
    breakpoints,
    canonicalize,
    conjugate,
    epsilon_regularize,
    eval_fn,
    fn_equal,
    recession,
    scale,
    support_function,
)
from convdual.corpus import (
    margin_tube,
    mu_continuous_map,
    optimal_pair,
    rand_complex,
    rand_integrand_field,
    rand_isc_union,
    rand_measure,
    rand_mu_selection,
    rand_polyconvex,
    rand_tube,
    tau_full_map,
)
from convdual.fixtures import REGULAR_SUITE, load_fixture
from convdual.functionals import (
    brute_force_primal,
    check_sd,
    domain_map,
    duality_gap,
    primal_conjugate,
    sigma_CS,
)
from convdual.measures import BaseMeasure, SignedMeasure
from convdual.plfun import PLFunction
from convdual.regularity import (
    check_closure_condition,
    check_ic_condition,
    mu_selection_check,
)
from convdual.setmap import (
    CellComplex,
    IntervalMap,
    affine_map,
    box_is_isc,
    hull_map,
    intersect_map,
    is_isc,
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


def _report(n, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {n}: {status} {detail}".rstrip())
    assert ok, f"criterion {n} failed: {detail}"


def _conjugate_corpus(seed=2024, n=500):
    rng = Random(seed)
    return [rand_polyconvex(rng, max_pieces=8) for _ in range(n)]


def _grid_oracle_check(f, tol=1e-6, step=1e-4):
    """Compare the exact conjugate against a uniform-grid sup on a bounding box."""
    g = conjugate(f)
    cands = breakpoints(f)
    for e in (f.dom.lo, f.dom.hi):
        if np.isfinite(e):
            cands.append(e)
    if not cands:
        cands = [0.0]
    lo = max(f.dom.lo, min(cands) - 0.5)
    hi = min(f.dom.hi, max(cands) + 0.5)
    if hi < lo:
        lo, hi = f.dom.lo, f.dom.hi
    n = max(1, int(round((hi - lo) / step)))
    xs = lo + (hi - lo) * np.arange(n + 1) / n
    vs = []
    vb = breakpoints(g)
    for e in (g.dom.lo, g.dom.hi):
        if np.isfinite(e):
            vb.append(e)
    vb = sorted(set(vb))
    if not vb:
        vb = [g.dom.pick()]
    vs.extend(vb)
    vs.extend(0.5 * (a + b) for a, b in zip(vb, vb[1:]))
    vs = np.asarray(sorted(vs))
    a = np.array([p[0] for p in f.pieces])
    b = np.array([p[1] for p in f.pieces])
    sup = kernels.maxaffine_grid_sup(a, b, f.dom.lo, f.dom.hi, xs, vs)
    for v, s in zip(vs, sup):
        exact = eval_fn(g, v)
        if abs(exact - s) > tol:
            return False, f"v={v}: exact {exact} vs grid {s}"
    return True, ""


def test_criterion_1_conjugation_exactness():
    t0 = time.monotonic()
    ok = True
    detail = ""
    for f in _conjugate_corpus():
        if not fn_equal(conjugate(conjugate(f)), canonicalize(f), 1e-12):
            ok, detail = False, f"biconjugation: {f}"
            break
        good, msg = _grid_oracle_check(f)
        if not good:
            ok, detail = False, f"grid oracle: {msg}"
            break
    elapsed = time.monotonic() - t0
    if ok and elapsed >= 5.0:
        ok, detail = False, f"runtime {elapsed:.2f}s >= 5s"
    _report(1, ok, detail or f"500 functions in {elapsed:.2f}s")


def test_criterion_2_recession_support_identity():
    bad = [
        f
        for f in _conjugate_corpus()
        if not fn_equal(recession(f), support_function(conjugate(f).dom), 1e-12)
    ]
    _report(2, not bad, f"{len(bad)} mismatches" if bad else "500 functions")


def test_criterion_3_eps_identity():
    rng = Random(5)
    count = 0
    for f in _conjugate_corpus(n=120):
        g = conjugate(f)
        regs = {}
        for eps in (0.1, 0.5, 1.0):
            reg = epsilon_regularize(f, eps)
            regs[eps] = reg
            lhs = conjugate(reg)
            rhs = add(g, scale(abs_fn(), eps))
            for _ in range(10):
                v = rng.uniform(-4, 4)
                a, b = eval_fn(lhs, v), eval_fn(rhs, v)
                count += 1
                if a == INF or b == INF:
                    if a != b:
                        _report(3, False, f"infinite-value mismatch at v={v}")
                elif abs(a - b) > 1e-9:
                    _report(3, False, f"|lhs-rhs|={abs(a - b)} at v={v}")
        for _ in range(10):
            x = rng.uniform(-4, 4)
            v1 = eval_fn(regs[0.5], x)
            if eval_fn(regs[1.0], x) > v1 + 1e-9 or v1 > eval_fn(regs[0.1], x) + 1e-9:
                _report(3, False, f"monotonicity in eps fails at x={x}")
    _report(3, count >= 1000, f"{count} sample points across 120 functions x 3 radii")


def test_criterion_4_calculus_preservation():
    rng = Random(11)
    n = 200
    for k in range(n):
        cpx = rand_complex(rng)
        s = rand_isc_union(rng, cpx)
        checks = {
            "input": is_isc(s)[0],
            "affine": is_isc(affine_map(s, -2.0, 0.25))[0],
            "hull": is_isc(hull_map(s))[0],
            "sum": is_isc(sum_map(s, rand_isc_union(rng, cpx)))[0],
            "union": is_isc(union_map(s, rand_isc_union(rng, cpx)))[0],
            "box": box_is_isc(product_map(s, rand_isc_union(rng, cpx)))[0],
        }
        tube = rand_tube(rng, cpx)
        checks["intersect-open-graph"] = is_isc(intersect_map(tube, margin_tube(tube, 2.0)))[0]
        checks["intersect-margin"] = is_isc(intersect_map(tube, margin_tube(tube, 0.25)))[0]
        bad = [name for name, good in checks.items() if not good]
        if bad:
            _report(4, False, f"map {k}: {bad}")
    _report(4, True, f"{n} maps x 7 operations")


def test_criterion_5_support_formula():
    t0 = time.monotonic()
    rng = Random(21)
    for k in range(50):
        cpx = rand_complex(rng, max_cells=3)
        tube = rand_tube(rng, cpx, shrink_nodes=False)
        theta = rand_measure(rng, BaseMeasure.lebesgue(cpx))
        prev = -INF
        for r in (64, 512, 4096):
            lp, formula = sigma_CS(tube, theta, r)
            if lp < prev - 1e-12:
                _report(5, False, f"map {k}: lp not monotone")
            prev = lp
        gap = formula - lp
        if not (-1e-9 <= gap <= 1e-3):
            _report(5, False, f"map {k}: gap {gap}")
    pinch = load_fixture("pinch")
    for r in (64, 512, 4096):
        lp, formula = sigma_CS(pinch.maps["pinch"], pinch.measures["atom05"], r)
        if abs((formula - lp) - 1.0) > 1e-9:
            _report(5, False, f"pinch gap at refinement {r}: {formula - lp}")
    elapsed = time.monotonic() - t0
    _report(5, elapsed < 120.0, f"50 maps + pinch in {elapsed:.2f}s")


def test_criterion_6_duality_suite():
    for name in REGULAR_SUITE:
        p = load_fixture(name)
        rep = duality_gap(p.integrand, p.measures["theta"], (8, 64, 512, 4096))
        if not rep.monotone:
            _report(6, False, f"{name}: primal not monotone")
        if abs(rep.j_value - rep.primal[-1]) > 1e-3:
            _report(6, False, f"{name}: |primal - J| = {abs(rep.j_value - rep.primal[-1])}")
        bf = brute_force_primal(p.integrand, p.measures["theta"], BF_GRIDS[name])
        p1 = primal_conjugate(p.integrand, p.measures["theta"], 1)
        if abs(bf - p1) > 1e-9:
            _report(6, False, f"{name}: brute force {bf} vs lp {p1}")
    inv = load_fixture("invdist")
    rep = duality_gap(inv.integrand, inv.measures["theta"], (8, 64))
    if not (rep.j_value == INF and max(rep.primal) <= 0.0 + 1e-12 and not rep.closure_ok):
        _report(6, False, f"invdist: J={rep.j_value} primal={rep.primal} closure={rep.closure_ok}")
    non = load_fixture("nonisc")
    rep = duality_gap(non.integrand, non.measures["theta"], (8, 64))
    if rep.isc:
        _report(6, False, "nonisc fixture reported isc=true")
    _report(6, True, "10 regular fixtures + 2 counterexamples")


def test_criterion_7_subdifferential_equivalence():
    rng = Random(31)
    for k in range(30):
        h, base, y, theta = optimal_pair(rng)
        rep = check_sd(h, y, theta)
        if not (rep.ok and rep.fenchel_gap <= 1e-8):
            _report(7, False, f"pair {k}: ok={rep.ok} gap={rep.fenchel_gap}")
        j = rng.randrange(h.complex.n_nodes)
        bad_y = check_sd(h, y.with_value(j, y.values[j] + 0.1), theta)
        if bad_y.ok or bad_y.fenchel_gap <= 1e-8:
            _report(7, False, f"pair {k}: node perturbation survived")
        i = rng.randrange(h.complex.n_cells)
        dens = list(theta.densities)
        dens[i] += 0.1
        bad_t = check_sd(h, y, SignedMeasure(base, tuple(dens), theta.atoms))
        if bad_t.ok or bad_t.fenchel_gap <= 1e-8:
            _report(7, False, f"pair {k}: density perturbation survived")
    _report(7, True, "30 pairs, both perturbation modes detected")


def test_criterion_8_ae_selection_theorem():
    rng = Random(41)
    n = 1000
    for k in range(n):
        cpx = rand_complex(rng)
        base = BaseMeasure.lebesgue(cpx)
        m = mu_continuous_map(rng, cpx) if k % 2 == 0 else tau_full_map(rng, cpx)
        y = rand_mu_selection(rng, m)
        mu_sel, sel = mu_selection_check(y, m, base)
        if mu_sel and not sel:
            _report(8, False, f"pair {k}: a.e. selection escaped the closure")
    cpx = CellComplex((0.0, 0.5, 1.0))
    pinch_down = IntervalMap.constant(cpx, Interval(0, 1)).with_node_value(1, Interval(0, 0))
    flags = mu_selection_check(
        PLFunction.constant(cpx, 0.7), pinch_down, BaseMeasure.lebesgue(cpx)
    )
    _report(8, flags == (True, False), f"{n} pairs + negative control {flags}")


def test_criterion_9_sufficiency_chain():
    rng = Random(51)
    fields = [load_fixture(name).integrand for name in REGULAR_SUITE]
    fields.append(load_fixture("invdist").integrand)
    fields.append(load_fixture("nonisc").integrand)
    for _ in range(50):
        fields.append(rand_integrand_field(rng, rand_complex(rng)))
    checked = 0
    for h in fields:
        base = BaseMeasure.lebesgue(h.complex)
        if not is_isc(domain_map(h))[0]:
            continue
        if check_ic_condition(h, base).ok:
            checked += 1
            if not check_closure_condition(h, base).ok:
                _report(9, False, "local integrability + isc without closure")
    _report(9, checked >= 50, f"{checked} fields with the hypothesis verified")


def test_criterion_10_selftest_determinism():
    from convdual.selftest import run

    t0 = time.monotonic()
    a, b = io.StringIO(), io.StringIO()
    code1 = run(0, a)
    code2 = run(0, b)
    elapsed = time.monotonic() - t0
    ok = code1 == 0 and code2 == 0 and a.getvalue() == b.getvalue()
    if ok and elapsed >= 300.0:
        ok = False
    _report(10, ok, f"two runs in {elapsed:.2f}s, byte-identical={a.getvalue() == b.getvalue()}")
