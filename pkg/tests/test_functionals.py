from random import Random

import pytest

from convdual.convex import INF, Interval, abs_fn, affine_fn, indicator
from convdual.corpus import optimal_pair, rand_measure
from convdual.errors import BudgetError, InfeasibleError
from convdual.functionals import (
    CellIntegrand,
    IntegrandField,
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
from convdual.measures import BaseMeasure, SignedMeasure, pair
from convdual.plfun import PLFunction
from convdual.setmap import CellComplex, IntervalMap, is_isc

CPX = CellComplex((0.0, 0.5, 1.0))
LEB = BaseMeasure.lebesgue(CPX)
BOX = indicator(Interval(0, 1))
H_BOX = IntegrandField.uniform(CPX, BOX)
H_ABS = IntegrandField.uniform(CPX, abs_fn())

CPX1 = CellComplex((0.0, 1.0))
LEB1 = BaseMeasure.lebesgue(CPX1)
H_INV = IntegrandField(
    CPX1, (CellIntegrand(abs_fn(), pole=0.0), ), (affine_fn(0, 0), abs_fn())
)


def test_domain_map_examples():
    d = domain_map(H_BOX)
    assert d.node_values == (Interval(0, 1),) * 3
    d2 = domain_map(H_ABS)
    assert d2.node_values[0] == Interval.real_line()
    mixed = IntegrandField(
        CPX,
        (CellIntegrand(indicator(Interval(0, 1))), CellIntegrand(indicator(Interval(2, 3)))),
        (indicator(Interval(0, 1)), indicator(Interval(0, 3)), indicator(Interval(2, 3))),
    )
    ok, bad = is_isc(domain_map(mixed))
    assert not ok and bad == (1,)


def test_eval_Ih_examples():
    y = PLFunction(CPX, (-0.5, 0.0, 0.5))
    assert eval_Ih(H_ABS, y, LEB) == pytest.approx(0.25)
    assert eval_Ih(H_BOX, PLFunction.constant(CPX, 0.5), LEB) == 0.0
    assert eval_Ih(H_BOX, PLFunction.constant(CPX, 2.0), LEB) == INF


def test_eval_Ih_weighted_cells():
    ident = PLFunction(CPX1, (0.0, 1.0))
    assert eval_Ih(H_INV, ident, LEB1) == pytest.approx(1.0)
    assert eval_Ih(H_INV, PLFunction.constant(CPX1, 0.3), LEB1) == INF
    assert eval_Ih(H_INV, PLFunction.constant(CPX1, 0.0), LEB1) == 0.0
    # off-pole weighted integral against an exact antiderivative:
    # y(t)=t on [0.5, 1.5] with pole 0.5 on the right cell only
    cpx = CellComplex((0.0, 0.5, 1.5))
    h = IntegrandField(
        cpx,
        (CellIntegrand(indicator(Interval(-9, 9))), CellIntegrand(abs_fn(), pole=0.5)),
        (affine_fn(0, 0), affine_fn(0, 0), abs_fn()),
    )
    y = PLFunction(cpx, (0.0, 0.0, 1.0))
    # integrand on the weighted cell: (t-0.5)/(t-0.5) = 1
    assert eval_Ih(h, y, BaseMeasure.lebesgue(cpx)) == pytest.approx(1.0)


def test_eval_J_examples():
    spike = SignedMeasure(LEB, (-1.0, -1.0), ((1, 1.0),))
    assert eval_J(H_BOX, spike) == pytest.approx(1.0)
    half = SignedMeasure(LEB, (0.5, 0.5))
    assert eval_J(H_ABS, half) == 0.0
    atom = SignedMeasure(LEB, (0.0, 0.0), ((1, 1.0),))
    assert eval_J(H_ABS, atom) == INF
    out = SignedMeasure(LEB, (1.5, 0.0))
    assert eval_J(H_ABS, out) == INF  # density outside the conjugate domain


def test_eval_J_weighted_cell_closed_form():
    # h_t = |x|/t: conjugate at constant rho is finite iff |rho|*t <= 1 on the cell
    inside = SignedMeasure(LEB1, (1.0,))
    assert eval_J(H_INV, inside) == pytest.approx(0.0)  # |rho*s| <= 1 => value 0
    outside = SignedMeasure(LEB1, (1.5,))
    assert eval_J(H_INV, outside) == INF
    # indicators are invariant under positive scaling, so the weighted box
    # integrand has the plain box conjugate pointwise
    hw = IntegrandField(
        CPX1, (CellIntegrand(indicator(Interval(0, 1)), pole=0.0),),
        (affine_fn(0, 0), indicator(Interval(0, 1))),
    )
    assert eval_J(hw, SignedMeasure(LEB1, (2.0,))) == pytest.approx(2.0)


def test_sigma_CS_examples():
    unit = IntervalMap.constant(CPX, Interval(0, 1))
    atom = SignedMeasure(LEB, (0.0, 0.0), ((1, 1.0),))
    lp, formula = sigma_CS(unit, atom, 16)
    assert lp == pytest.approx(1.0) and formula == pytest.approx(1.0)

    pinch = IntervalMap.constant(CPX, Interval(0, 0)).with_node_value(1, Interval(0, 1))
    lp, formula = sigma_CS(pinch, atom, 16)
    assert lp == pytest.approx(0.0) and formula == pytest.approx(1.0)

    tube = IntervalMap.from_node_samples(CPX, (0.0, 0.5, 1.0), (1.0, 1.5, 2.0))
    dens = SignedMeasure(LEB, (1.0, 1.0))
    lp, formula = sigma_CS(tube, dens, 16)
    assert lp == pytest.approx(1.5) and formula == pytest.approx(1.5)


def test_sigma_CS_union_map_with_hull_refinement():
    # branch lines crossing at t=0.25 (off the node grid) force the hull onto
    # a refined complex; the measure is carried over and the identity holds
    from convdual.setmap import UnionMap, hull_map

    rising = IntervalMap.from_node_samples(CPX, (0.0, 0.5, 1.0), (0.0, 0.5, 1.0))
    falling = IntervalMap.from_node_samples(CPX, (0.5, 0.0, 0.5), (0.5, 0.0, 0.5))
    u = UnionMap((rising, falling))
    assert 0.25 in hull_map(u).complex.nodes
    theta = SignedMeasure(LEB, (1.0, 1.0), ((0, 0.5),))
    lp, formula = sigma_CS(u, theta, 64)
    # upper hull: max(t, 0.5-t) then max(t, t-0.5); atom sees hull({0, 0.5})
    assert formula == pytest.approx(0.1875 + 0.375 + 0.25)
    assert lp == pytest.approx(formula, abs=1e-3)
    assert lp <= formula + 1e-12


def test_sigma_CS_infeasible():
    bad = IntervalMap.constant(CPX, Interval(0.2, 1.0)).with_node_value(1, Interval(0, 0))
    atom = SignedMeasure(LEB, (0.0, 0.0), ((1, 1.0),))
    with pytest.raises(InfeasibleError):
        sigma_CS(bad, atom, 4)


def test_primal_conjugate_examples():
    dens2 = SignedMeasure(LEB, (2.0, 2.0))
    for r in (1, 4, 64):
        assert primal_conjugate(H_BOX, dens2, r) == pytest.approx(2.0)
    half = SignedMeasure(LEB, (0.5, 0.5))
    assert primal_conjugate(H_ABS, half, 8) == pytest.approx(0.0)
    spike = SignedMeasure(LEB, (-1.0, -1.0), ((1, 1.0),))
    prev = -INF
    for r in (8, 64, 512, 4096):
        v = primal_conjugate(H_BOX, spike, r)
        assert v >= prev - 1e-12
        assert v == pytest.approx(1.0 - 0.5 / r, abs=1e-12)
        prev = v


def test_brute_force_primal_examples():
    dens2 = SignedMeasure(LEB, (2.0, 2.0))
    assert brute_force_primal(H_BOX, dens2, (0.0, 1.0, 21)) == pytest.approx(2.0)
    spike_cpx = CellComplex((0.0, 0.25, 0.5, 0.75, 1.0))
    h = IntegrandField.uniform(spike_cpx, BOX)
    theta = SignedMeasure(BaseMeasure.lebesgue(spike_cpx), (-1.0,) * 4, ((2, 1.0),))
    bf = brute_force_primal(h, theta, (0.0, 1.0, 21))
    lp = primal_conjugate(h, theta, 1)
    assert bf == pytest.approx(lp, abs=1e-9)
    half = SignedMeasure(LEB, (0.5, 0.5))
    assert brute_force_primal(H_ABS, half, (-1.0, 1.0, 21)) == pytest.approx(0.0)


def test_brute_force_budget():
    big = CellComplex(tuple(0.1 * k for k in range(8)))
    h = IntegrandField.uniform(big, BOX)
    theta = SignedMeasure(BaseMeasure.lebesgue(big), (1.0,) * 7)
    with pytest.raises(BudgetError):
        brute_force_primal(h, theta, (0.0, 1.0, 21))
    with pytest.raises(BudgetError):
        brute_force_primal(H_BOX, SignedMeasure(LEB, (1.0, 1.0)), (0.0, 1.0, 42))


def test_duality_gap_report():
    spike = SignedMeasure(LEB, (-1.0, -1.0), ((1, 1.0),))
    rep = duality_gap(H_BOX, spike, (8, 64, 512, 4096))
    assert rep.monotone and rep.isc and rep.closure_ok and rep.proper
    assert rep.j_value == pytest.approx(1.0)
    assert rep.gaps[-1] <= 1e-3
    # the discretization bias is one-sided: the primal never exceeds the dual
    assert all(g >= -1e-12 for g in rep.gaps)


def test_duality_gap_weighted_counterexample():
    theta = SignedMeasure(LEB1, (0.0,), ((0, 1.0),))
    rep = duality_gap(H_INV, theta, (8, 64))
    assert rep.j_value == INF
    assert max(rep.primal) <= 1e-12
    assert rep.isc and not rep.closure_ok


def test_duality_gap_non_isc_diagnostics():
    from convdual.fixtures import load_fixture

    p = load_fixture("nonisc")
    rep = duality_gap(p.integrand, p.measures["theta"], (8, 64, 512))
    assert not rep.isc and rep.isc_violations == (1,)
    assert rep.monotone
    # the atom at the inflated node keeps a persistent gap of 2 under refinement
    assert rep.gaps[-1] == pytest.approx(2.0, abs=1e-2)


def test_check_sd_examples():
    ones = PLFunction.constant(CPX, 1.0)
    dens = SignedMeasure(LEB, (1.0, 1.0))
    rep = check_sd(H_BOX, ones, dens)
    assert rep.ok and rep.fenchel_gap <= 1e-12

    mid = PLFunction.constant(CPX, 0.5)
    rep = check_sd(H_BOX, mid, dens)
    assert not rep.ok and rep.fenchel_gap > 1e-8

    atom = SignedMeasure(LEB, (0.0, 0.0), ((1, 1.0),))
    rep = check_sd(H_BOX, ones, atom)
    assert rep.ok and rep.fenchel_gap <= 1e-12


def test_check_sd_weighted_cell():
    # rho*t must be a subgradient of the base along y: y=0 works for |rho|<=1
    theta = SignedMeasure(LEB1, (1.0,))
    zero = PLFunction.constant(CPX1, 0.0)
    rep = check_sd(H_INV, zero, theta)
    assert rep.ok and rep.fenchel_gap <= 1e-9
    # y(t) = t puts the density outside the pointwise subdifferential a.e.
    rep_bad = check_sd(H_INV, PLFunction(CPX1, (0.0, 1.0)), theta)
    assert not rep_bad.ok and rep_bad.fenchel_gap == pytest.approx(0.5)


def test_check_proper_examples():
    w = check_proper(H_BOX, LEB)
    assert w.proper and eval_Ih(H_BOX, w.ybar, LEB) == 0.0
    w2 = check_proper(H_ABS, LEB)
    assert w2.proper and w2.alpha == 0.0
    mixed = IntegrandField(
        CPX,
        (CellIntegrand(indicator(Interval(0, 1))), CellIntegrand(indicator(Interval(2, 3)))),
        (indicator(Interval(0, 1)), indicator(Interval(0, 3)), indicator(Interval(2, 3))),
    )
    assert not check_proper(mixed, LEB).proper


def test_functional_fenchel_inequality():
    rng = Random(17)
    for _ in range(30):
        h, base, y, theta = optimal_pair(rng)
        other = rand_measure(rng, base)
        ih = eval_Ih(h, y, base)
        jv = eval_J(h, other)
        if ih < INF and jv < INF:
            assert ih + jv >= pair(y, other) - 1e-9


def test_optimal_pairs_and_perturbations():
    rng = Random(23)
    for _ in range(10):
        h, base, y, theta = optimal_pair(rng)
        rep = check_sd(h, y, theta)
        assert rep.ok and rep.fenchel_gap <= 1e-8
        bad = check_sd(h, y.with_value(0, y.values[0] + 0.1), theta)
        assert not bad.ok and bad.fenchel_gap > 1e-8
