from random import Random

import pytest

from convdual.convex import Interval, abs_fn, affine_fn, indicator
from convdual.corpus import (
    mu_continuous_map,
    rand_complex,
    rand_integrand_field,
    rand_mu_selection,
    rand_tube,
    tau_full_map,
)
from convdual.errors import SchemaError
from convdual.functionals import CellIntegrand, IntegrandField, domain_map
from convdual.measures import BaseMeasure
from convdual.plfun import PLFunction
from convdual.regularity import (
    analyze_map,
    check_closure_condition,
    check_ic_condition,
    is_full_lsc,
    is_mu_continuous,
    is_outer_mu_regular,
    is_tau_full,
    mli_at,
    mu_selection_check,
)
from convdual.setmap import CellBand, CellComplex, IntervalMap, is_isc

CPX = CellComplex((0.0, 0.5, 1.0))
LEB = BaseMeasure.lebesgue(CPX)

PINCH_UP = IntervalMap.constant(CPX, Interval(0, 0)).with_node_value(1, Interval(0, 1))
PINCH_DOWN = IntervalMap.constant(CPX, Interval(0, 1)).with_node_value(1, Interval(0, 0))


def test_mli_examples():
    assert mli_at(PINCH_DOWN, 1).parts == (Interval(0, 1),)
    assert mli_at(PINCH_UP, 1).parts == (Interval(0, 0),)
    disjoint = IntervalMap(
        CPX,
        (CellBand.constant(Interval(0, 1)), CellBand.constant(Interval(2, 3))),
        (Interval(0, 1), Interval(0, 3), Interval(2, 3)),
    )
    assert mli_at(disjoint, 1).is_empty


def test_outer_mu_regular_examples():
    assert is_outer_mu_regular(PINCH_UP)[0]
    ok, bad = is_outer_mu_regular(PINCH_DOWN)
    assert not ok and bad == (1,)
    assert is_outer_mu_regular(IntervalMap.constant(CPX, Interval(0, 1)))[0]


def test_mu_continuous_examples():
    step = IntervalMap(
        CPX,
        (CellBand.constant(Interval(0, 0)), CellBand.constant(Interval(1, 1))),
        (Interval(0, 0), Interval(1, 1), Interval(1, 1)),
    )
    assert is_mu_continuous(step)[0]
    mismatched = IntervalMap(
        CPX,
        (CellBand.constant(Interval(0, 1)), CellBand.constant(Interval(0.5, 2))),
        (Interval(0, 1), Interval(0.4, 1.2), Interval(0.5, 2)),
    )
    ok, bad = is_mu_continuous(mismatched)
    assert not ok and bad == (1,)
    assert is_mu_continuous(IntervalMap.constant(CPX, Interval(0, 1)))[0]


def test_tau_full_examples():
    ok, bad = is_tau_full(PINCH_DOWN)
    assert not ok and bad == (1,)
    assert is_tau_full(IntervalMap.constant(CPX, Interval(0, 1)))[0]
    tube = IntervalMap.from_node_samples(CPX, (0.0, 0.5, 1.0), (1.0, 1.5, 2.0))
    assert is_tau_full(tube)[0]


def test_full_lsc_solid_requirement():
    with pytest.raises(SchemaError):
        is_full_lsc(PINCH_UP)  # point-valued cells are not solid
    tube = IntervalMap.from_node_samples(CPX, (0.0, 0.5, 1.0), (1.0, 1.5, 2.0))
    assert is_full_lsc(tube)[0]
    squeezed = tube.with_node_value(1, Interval(0.5, 0.5))
    assert not is_full_lsc(squeezed)[0]


def test_check_ic_condition_examples():
    assert check_ic_condition(IntegrandField.uniform(CPX, indicator(Interval(0, 1))), LEB).ok
    assert check_ic_condition(IntegrandField.uniform(CPX, abs_fn()), LEB).ok
    cpx1 = CellComplex((0.0, 1.0))
    h_inv = IntegrandField(
        cpx1, (CellIntegrand(abs_fn(), pole=0.0),), (affine_fn(0, 0), abs_fn())
    )
    rep = check_ic_condition(h_inv, BaseMeasure.lebesgue(cpx1))
    assert not rep.ok
    assert any(t == 0.0 and abs(v) > 1e-9 for t, v in rep.witnesses)


def test_check_closure_condition_examples():
    assert check_closure_condition(
        IntegrandField.uniform(CPX, indicator(Interval(0, 1))), LEB
    ).ok
    assert check_closure_condition(IntegrandField.uniform(CPX, abs_fn()), LEB).ok
    cpx1 = CellComplex((0.0, 1.0))
    h_inv = IntegrandField(
        cpx1, (CellIntegrand(abs_fn(), pole=0.0),), (affine_fn(0, 0), abs_fn())
    )
    rep = check_closure_condition(h_inv, BaseMeasure.lebesgue(cpx1))
    assert not rep.ok and "node 0" in rep.witness


def test_mu_selection_check_examples():
    y07 = PLFunction.constant(CPX, 0.7)
    assert mu_selection_check(y07, PINCH_DOWN, LEB) == (True, False)
    assert mu_selection_check(PLFunction.constant(CPX, 0.0), PINCH_DOWN, LEB) == (True, True)
    # node value inflated beyond the tube: a.e. selections remain selections
    inflated = IntervalMap.constant(CPX, Interval(0, 1)).with_node_value(1, Interval(0, 2))
    assert mu_selection_check(y07, inflated, LEB) == (True, True)
    # through the narrowed tube the same function is not even a.e. admissible
    assert mu_selection_check(y07, PINCH_UP, LEB) == (False, False)


def test_ae_selection_theorem_small_corpus():
    rng = Random(77)
    for k in range(200):
        cpx = rand_complex(rng)
        base = BaseMeasure.lebesgue(cpx)
        m = mu_continuous_map(rng, cpx) if k % 2 == 0 else tau_full_map(rng, cpx)
        y = rand_mu_selection(rng, m)
        mu_sel, sel = mu_selection_check(y, m, base)
        assert (not mu_sel) or sel


def test_continuity_implies_outer_regularity():
    rng = Random(78)
    for _ in range(100):
        cpx = rand_complex(rng)
        m = mu_continuous_map(rng, cpx)
        assert is_outer_mu_regular(m)[0]


def test_full_lsc_implies_tau_full():
    rng = Random(79)
    checked = 0
    for _ in range(100):
        cpx = rand_complex(rng)
        m = rand_tube(rng, cpx, solid=True, shrink_nodes=False)
        if is_full_lsc(m)[0]:
            checked += 1
            assert is_tau_full(m)[0]
    assert checked > 50


def test_ic_plus_isc_implies_closure():
    rng = Random(80)
    for _ in range(40):
        h = rand_integrand_field(rng, rand_complex(rng))
        base = BaseMeasure.lebesgue(h.complex)
        if not is_isc(domain_map(h))[0]:
            continue
        if check_ic_condition(h, base).ok:
            assert check_closure_condition(h, base).ok


def test_analyze_map_report_shape():
    rep = analyze_map(PINCH_DOWN, LEB)
    assert rep.isc == (True, True, True)
    assert rep.osc == (True, False, True)
    assert rep.outer_mu_regular == (True, False, True)
    assert rep.tau_full == (True, False, True)
    assert rep.mu_continuous == (True, False, True)
