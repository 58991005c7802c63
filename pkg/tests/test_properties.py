"""Cross-cutting randomized properties beyond the per-module example tests."""

from random import Random

import pytest
from hypothesis import given, settings, strategies as st

from convdual.convex import INF, PolyConvexFn, canonicalize, eval_fn
from convdual.corpus import (
    _lattice,
    rand_base,
    rand_complex,
    rand_integrand_field,
    rand_isc_union,
    rand_measure,
    rand_polyconvex,
    rand_tube,
)
from convdual.functionals import (
    brute_force_primal,
    domain_map,
    eval_Ih,
    primal_conjugate,
)
from convdual.plfun import PLFunction
from convdual.setmap import hull_map, intersect_map, michael_selection


def _sample_xs(f, n=41):
    lo = f.dom.lo if f.dom.lo > -INF else -3.5
    hi = f.dom.hi if f.dom.hi < INF else 3.5
    if lo == hi:
        return [lo]
    return [lo + k * (hi - lo) / (n - 1) for k in range(n)]


@settings(max_examples=150, deadline=None, derandomize=True)
@given(st.integers(0, 2**31))
def test_canonicalize_is_pointwise_identity_and_minimal(seed):
    rng = Random(seed)
    f = rand_polyconvex(rng)
    # add junk: duplicated and dominated pieces
    junk = list(f.pieces)
    for a, b in f.pieces[: rng.randint(0, len(f.pieces))]:
        junk.append((a, b - rng.random()))
    g = canonicalize(PolyConvexFn(tuple(junk), f.dom))
    for x in _sample_xs(f):
        assert eval_fn(g, x) == pytest.approx(eval_fn(f, x), abs=1e-9)
    if len(g.pieces) > 1 and not f.dom.is_point:
        for k in range(len(g.pieces)):
            reduced = PolyConvexFn(g.pieces[:k] + g.pieces[k + 1:], g.dom)
            assert any(
                eval_fn(reduced, x) < eval_fn(g, x) - 1e-12
                for x in _sample_xs(g, 201)
            ), f"piece {k} of {g} is redundant"


@settings(max_examples=60, deadline=None, derandomize=True)
@given(st.integers(0, 2**31))
def test_intersection_and_hull_are_pointwise_correct(seed):
    rng = Random(seed)
    cpx = rand_complex(rng)
    a = rand_tube(rng, cpx, shrink_nodes=False)
    b = rand_tube(rng, cpx, shrink_nodes=False)
    inter = intersect_map(a, b)
    hull = hull_map(rand_isc_union(rng, cpx))
    lo, hi = cpx.nodes[0], cpx.nodes[-1]
    for k in range(60):
        t = lo + (hi - lo) * (k + 0.5) / 61
        got = inter.value_at(t)
        expect = a.value_at(t).intersect(b.value_at(t))
        if expect.is_empty:
            assert got.is_empty or all(p.hi - p.lo <= 1e-9 for p in got.parts)
        else:
            assert got.hull().lo == pytest.approx(expect.lo, abs=1e-9)
            assert got.hull().hi == pytest.approx(expect.hi, abs=1e-9)
    src = hull  # hull output must contain a selection of each branch point
    y = michael_selection(src)
    for k in range(30):
        t = lo + (hi - lo) * (k + 0.5) / 31
        assert src.value_at(t).contains(y(t), 1e-9)


@settings(max_examples=60, deadline=None, derandomize=True)
@given(st.integers(0, 2**31))
def test_eval_Ih_matches_dense_trapezoid(seed):
    rng = Random(seed)
    h = rand_integrand_field(rng, rand_complex(rng))
    base = rand_base(rng, h.complex)
    y = michael_selection(domain_map(h))
    exact = eval_Ih(h, y, base)
    assert exact < INF
    total = 0.0
    n = 800
    for i in range(h.complex.n_cells):
        c, d = h.complex.cell(i)
        fn = h.cells[i].fn
        vals = []
        for k in range(n + 1):
            t = c + k * (d - c) / n
            vals.append(eval_fn(fn, min(max(y(t), fn.dom.lo), fn.dom.hi)))
        total += base.densities[i] * (d - c) * (
            0.5 * vals[0] + sum(vals[1:-1]) + 0.5 * vals[-1]
        ) / n
    assert exact == pytest.approx(total, abs=1e-4)


@settings(max_examples=40, deadline=None, derandomize=True)
@given(st.integers(0, 2**31))
def test_primal_matches_brute_force_on_random_instances(seed):
    rng = Random(seed)
    cpx = rand_complex(rng, max_cells=2)
    h = rand_integrand_field(rng, cpx)
    base = rand_base(rng, cpx)
    theta = rand_measure(rng, base)
    lp = primal_conjugate(h, theta, 1)
    bf = brute_force_primal(h, theta, (-2.5, 2.5, 41))
    # domain boxes and kinks live on the 0.125 lattice, which the 41-step
    # grid over [-2.5, 2.5] contains exactly, so the enumeration hits the
    # active-set optimum
    assert bf == pytest.approx(lp, abs=1e-9)


def test_pl_refinement_is_exact_on_dyadic_chains():
    rng = Random(7)
    cpx = rand_complex(rng)
    y = PLFunction(cpx, tuple(_lattice(rng, -1.0, 1.0, 0.25) for _ in cpx.nodes))
    y8 = y.refined(8)
    y64 = y.refined(64)
    for j, t in enumerate(y8.complex.nodes):
        k = y64.complex.nodes.index(t)
        assert y64.values[k] == y8.values[j]
