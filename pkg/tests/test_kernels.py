"""Backend equivalence: the compiled and pure kernels must agree bit for bit."""

import importlib
from random import Random

import numpy as np
import pytest

import convdual._kernels as kernels
from convdual._kernels import _pure

_fast = None
try:
    from convdual._kernels import _fast  # type: ignore[no-redef]
except ImportError:
    pass

needs_fast = pytest.mark.skipif(_fast is None, reason="compiled kernels not built")


def _random_fn_arrays(rng):
    n = rng.randint(1, 8)
    a = np.sort(np.array([rng.uniform(-3, 3) for _ in range(n)]))
    b = np.array([rng.uniform(-2, 2) for _ in range(n)])
    return a, b


@needs_fast
def test_grid_sup_equivalence():
    rng = Random(101)
    for _ in range(50):
        a, b = _random_fn_arrays(rng)
        lo = rng.choice([-np.inf, rng.uniform(-2, 0)])
        hi = rng.choice([np.inf, rng.uniform(0.5, 2)])
        xs = np.linspace(-3, 3, 5001)
        vs = np.array([rng.uniform(-3, 3) for _ in range(7)])
        r1 = _pure.maxaffine_grid_sup(a, b, lo, hi, xs, vs)
        r2 = _fast.maxaffine_grid_sup(a, b, lo, hi, xs, vs)
        assert np.array_equal(r1, r2)


def _random_node_batch(rng, n):
    c = np.array([rng.uniform(-2, 2) for _ in range(n)])
    lo = np.array([rng.choice([-np.inf, rng.uniform(-2, 0)]) for _ in range(n)])
    hi = np.array([rng.choice([np.inf, rng.uniform(0.5, 2)]) for _ in range(n)])
    term_ptr = [0]
    term_w = []
    piece_ptr = [0]
    pa, pb = [], []
    for _ in range(n):
        for _ in range(rng.randint(0, 2)):
            term_w.append(rng.uniform(0.1, 2.0))
            fa, fb = _random_fn_arrays(rng)
            pa.extend(fa)
            pb.extend(fb)
            piece_ptr.append(len(pa))
        term_ptr.append(len(term_w))
    return (
        c, lo, hi,
        np.asarray(term_ptr, dtype=np.int64),
        np.asarray(term_w, dtype=np.float64),
        np.asarray(piece_ptr, dtype=np.int64),
        np.asarray(pa, dtype=np.float64),
        np.asarray(pb, dtype=np.float64),
    )


@needs_fast
def test_node_lp_equivalence():
    rng = Random(202)
    for _ in range(30):
        args = _random_node_batch(rng, rng.randint(1, 40))
        v1, y1 = _pure.node_lp_batch(*args)
        v2, y2 = _fast.node_lp_batch(*args)
        assert np.array_equal(v1, v2)
        assert np.array_equal(y1, y2, equal_nan=True)


@needs_fast
def test_product_table_max_equivalence():
    rng = Random(303)
    for _ in range(30):
        n = rng.randint(1, 5)
        ptr = [0]
        vals = []
        for _ in range(n):
            k = rng.randint(1, 9)
            for _ in range(k):
                vals.append(rng.choice([rng.uniform(-5, 5), -np.inf]))
            ptr.append(len(vals))
        ptr = np.asarray(ptr, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        m1 = _pure.product_table_max(ptr, vals)
        m2 = _fast.product_table_max(ptr, vals)
        assert m1 == m2 or (np.isinf(m1) and np.isinf(m2) and m1 == m2)


def test_product_table_max_against_naive():
    rng = Random(404)
    import itertools

    for _ in range(20):
        n = rng.randint(1, 4)
        tables = [[rng.uniform(-3, 3) for _ in range(rng.randint(1, 5))] for _ in range(n)]
        ptr = np.cumsum([0] + [len(t) for t in tables]).astype(np.int64)
        vals = np.asarray([v for t in tables for v in t])
        naive = max(sum(tup) for tup in itertools.product(*tables))
        got = kernels.product_table_max(ptr, vals)
        assert got == pytest.approx(naive, abs=1e-12)


@needs_fast
def test_primal_solve_backend_bit_equality(monkeypatch):
    # a full discretized-conjugate solve must not depend on the backend
    import convdual.functionals as F
    from convdual.fixtures import load_fixture

    p = load_fixture("reg05")
    compiled = F.primal_conjugate(p.integrand, p.measures["theta"], 512)
    monkeypatch.setattr(F, "kernels", _pure)
    pure = F.primal_conjugate(p.integrand, p.measures["theta"], 512)
    assert compiled == pure


def test_pure_env_override(monkeypatch):
    monkeypatch.setenv("CONVDUAL_PURE", "1")
    import convdual._kernels as K

    mod = importlib.reload(K)
    assert mod.BACKEND == "pure"
    monkeypatch.delenv("CONVDUAL_PURE")
    importlib.reload(K)
