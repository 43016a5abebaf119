from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infotop.errors import IndexOutOfRange, MethodSetMismatch
from infotop.observers import obs_meet
from infotop.spread import (
    SpreadModel,
    display_formula,
    emit_figure_data,
    expected_spread,
    gamma_algebra_bridge,
    gamma_observer,
    integrate_numeric,
    level_model,
    max_discrepancy,
    pn_closed_form,
    pn_polynomials,
    sawtooth_gamma,
)


def single(g, M=10, init=None):
    return SpreadModel((("m", 0),), {"m": g}, M, (0, 10), {"m": init} if init else {})


def test_closed_form_examples():
    m = single(Fr(1, 100))
    assert pn_closed_form(m, "m", 1, 10) == Fr(1, 10)
    assert pn_closed_form(m, "m", 2, 10) == Fr(1, 200)
    init = tuple(Fr(i, 100) for i in range(11))
    mi = single(Fr(1, 100), init=init)
    for n in range(11):
        assert pn_closed_form(mi, "m", n, 0) == init[n]


def test_closed_form_range_checks():
    m = single(Fr(1, 100))
    with pytest.raises(IndexOutOfRange):
        pn_closed_form(m, "m", 11, 1)
    with pytest.raises(IndexOutOfRange):
        pn_closed_form(m, "m", 1, 11)


def test_expected_spread():
    m2 = single(Fr(1, 100), M=2)
    assert expected_spread(m2, "m", 10) == Fr(11, 100)
    assert expected_spread(single(0), "m", 5) == 0
    frozen = single(0, M=3, init=(0, 1, 0, 0))
    assert expected_spread(frozen, "m", 7) == 1


def test_sawtooth_values():
    assert sawtooth_gamma(4) == Fr(1, 100)
    assert sawtooth_gamma("4.5") == Fr(1, 200)
    assert sawtooth_gamma("4.9") == Fr(7, 1000)
    for i in range(30):
        x = Fr(i, 7)
        assert 0 < sawtooth_gamma(x) <= Fr(1, 100)
        assert sawtooth_gamma(x + Fr(1, 3)) == sawtooth_gamma(x)


def test_zero_init_degree_and_monomial():
    m = single(Fr(1, 50))
    polys = pn_polynomials(m, "m")
    for n in range(1, 11):
        assert len(polys[n]) - 1 == n
        assert polys[n][n] == Fr(1, 50) ** n / n


def test_display_formula_agreement():
    g = Fr(3, 100)
    init = (Fr(0), Fr(1, 10), Fr(1, 5), Fr(0), Fr(0), Fr(0))
    m = single(g, M=5, init=init)
    for n in range(6):
        for t in (0, 1, Fr(7, 2), 10):
            assert display_formula(g, init, n, t) == pn_closed_form(m, "m", n, t)


def test_display_formula_differs_with_higher_init():
    g = Fr(3, 100)
    init = (0, 0, 0, Fr(1, 10), 0)
    m = single(g, M=4, init=init)
    assert display_formula(g, init, 3, 2) == pn_closed_form(m, "m", 3, 2)
    assert display_formula(g, init, 4, 2) != pn_closed_form(m, "m", 4, 2)


def test_rk4_trivial_cases():
    m = single(Fr(1, 100))
    traj = integrate_numeric(m, "m", 0, Fr(1, 1000))
    assert len(traj) == 1 and traj[0].p == tuple(0.0 for _ in range(11))
    z = single(0, init=(0, Fr(1, 2)) + (0,) * 9)
    end = integrate_numeric(z, "m", 2, Fr(1, 100))[-1]
    assert end.p[1] == pytest.approx(0.5) and end.p[0] == pytest.approx(2.0)


def test_rk4_matches_exact():
    m = single(Fr(1, 100))
    assert max_discrepancy(m, "m", 10, Fr(1, 1000)) <= 1e-9


def test_range_flags_not_clamped():
    traj = integrate_numeric(single(0), "m", 2, Fr(1, 10))
    last = traj[-1]
    assert last.p[0] > 1 and last.range_flags[0] and last.out_of_range
    assert last.mass > 1


@settings(max_examples=40, deadline=None)
@given(
    st.fractions(min_value=0, max_value=1, max_denominator=200),
    st.fractions(min_value=0, max_value=1, max_denominator=200),
    st.integers(min_value=1, max_value=10),
    st.fractions(min_value=Fr(1, 100), max_value=10, max_denominator=100),
)
def test_monotone_in_gamma(a, b, n, t):
    if a == b:
        return
    lo, hi = min(a, b), max(a, b)
    assert pn_closed_form(single(lo), "m", n, t) < pn_closed_form(single(hi), "m", n, t)


def test_bridge():
    saw = SpreadModel.from_tags([4, "4.5", "4.9"])
    flat = SpreadModel(saw.methods, {n: Fr(1, 200) for n in saw.names}, 10)
    j, mt = gamma_algebra_bridge(saw, flat)
    assert [j.gamma[n] for n in saw.names] == [Fr(1, 100), Fr(1, 200), Fr(7, 1000)]
    assert [mt.gamma[n] for n in saw.names] == [Fr(1, 200)] * 3
    same, _ = gamma_algebra_bridge(saw, saw)
    assert same.gamma == saw.gamma
    assert gamma_observer(mt) == obs_meet(gamma_observer(saw), gamma_observer(flat))
    other = SpreadModel.from_tags([1, 2, 3])
    with pytest.raises(MethodSetMismatch):
        gamma_algebra_bridge(saw, other)


def test_level_model_constant_rate():
    m = level_model(["a", "b"], Fr(1, 10), 10)
    assert all(v == Fr(1, 10) for v in gamma_observer(m).values)


def test_sawtooth_period():
    rows = emit_figure_data("sawtooth")
    assert rows[0] == ["x", "gamma"]
    vals = [r[1] for r in rows[1:]]
    assert vals[:20] == vals[20:40]


def test_curves_ordering_and_origin():
    rows = emit_figure_data("curves")
    assert rows[0] == ["t", "p2[x=4]", "p2[x=9/2]", "p2[x=49/10]"]
    assert all(float(v) == 0 for v in rows[1][1:])
    for r in rows[2:]:
        a, b, c = (float(v) for v in r[1:])
        assert a > c > b


def test_surface_grid_shape():
    rows = emit_figure_data("surface", t_grid=[0, 1, 2])
    assert rows[0] == ["x", "t", "p2"]
    assert len(rows) == 1 + 21 * 3
    arr = np.array([[float(v) for v in r] for r in rows[1:]])
    assert np.all(arr[:, 2] >= 0)
