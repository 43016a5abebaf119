import itertools
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infotop.algebra import (
    AlgebraUniverse,
    check_axioms,
    check_triples,
    meet_closure,
    recheck,
    sup_set,
)
from infotop.errors import BudgetExceeded, ClosureViolation, NotInUniverse
from infotop.observers import (
    CompleteObserverSpace,
    GroundSet,
    Observer,
    line_ground,
    obs_join,
    obs_meet,
    observer_universe,
    projective_ops,
)


def scalars(*vals):
    return AlgebraUniverse([Fr(v) for v in vals], max, min)


def test_scalar_sup_set_definition_scan():
    u = scalars(0, "1/4", "1/2", "7/10", 1)
    assert sup_set([Fr(0), Fr(1, 2)], u) == [Fr(1, 2)]
    assert u.sup_set_by_definition([Fr(0), Fr(1, 2)]) == [Fr(1, 2)]


def test_sup_set_of_singleton_contains_it():
    u = scalars(0, "1/2", 1)
    for x in u:
        assert x in sup_set([x], u)


def test_sup_set_rejects_foreign_member():
    with pytest.raises(NotInUniverse):
        sup_set([Fr(1, 3)], scalars(0, 1))


def test_sup_set_may_be_empty():
    # a and b have no common upper bound in this universe
    g = line_ground(["p", "q"])
    a, b = Observer(g, [1, 0]), Observer(g, [0, 1])
    u = AlgebraUniverse([a, b], obs_join, obs_meet, "open-world", encoder=None)
    assert u.sup_set([a, b]) == []


def test_sup_set_order_independent():
    u = scalars(0, "1/4", "1/2", "7/10", 1)
    fam = [Fr(1, 4), Fr(7, 10), Fr(0)]
    rev = AlgebraUniverse(list(reversed(u.elements)), max, min)
    for perm in itertools.permutations(fam):
        assert sup_set(list(perm), u) == sup_set(fam, rev) == [Fr(7, 10)]


def test_single_element_universe():
    rep = check_axioms(scalars(1))
    assert rep.all_hold and rep.mode == "exhaustive"


def test_min_max_scalars_hold_exhaustively():
    rep = check_axioms(scalars(0, "1/3", "1/2", 1))
    assert rep.all_hold
    assert rep.meet_commutative
    assert rep.triples_checked == 64


def test_right_projection_meet_fails_absorption():
    u = AlgebraUniverse([Fr(0), Fr(1, 2), Fr(1)], max, lambda a, b: b)
    rep = check_axioms(u)
    v = rep.verdicts["ii"]
    assert v.failed
    assert recheck(v, u.join, u.meet)
    assert not rep.meet_commutative


def test_left_projection_meet_still_satisfies_axioms():
    # with max as join, a ^ b := a passes every listed axiom
    u = AlgebraUniverse([Fr(0), Fr(1, 2), Fr(1)], max, lambda a, b: a)
    rep = check_axioms(u)
    assert rep.all_hold
    assert not rep.meet_commutative


def test_failed_verdicts_always_recheck():
    u = AlgebraUniverse([Fr(0), Fr(1, 2), Fr(1)], lambda a, b: a, min)
    rep = check_axioms(u)
    for v in rep.verdicts.values():
        if v.failed:
            assert recheck(v, u.join, u.meet)


def test_closed_mode_detects_escape():
    u = AlgebraUniverse([Fr(1, 4), Fr(1, 2)], lambda a, b: a + b if a != b else a, min)
    with pytest.raises(ClosureViolation):
        check_axioms(u)


def test_sampling_mode_is_labelled():
    u = scalars(*[Fr(i, 10) for i in range(11)])
    rep = check_axioms(u, sample_budget=100, seed=3)
    assert rep.mode == "sampled"
    assert all(v.status == "sampled" for v in rep.verdicts.values())


def test_meet_closure_trivial_and_comparable():
    g = line_ground(["p", "q"])
    a, b = Observer(g, ["1/4", "1/2"]), Observer(g, ["1/2", "3/4"])
    u = observer_universe([a, b], "open-world")
    assert meet_closure([a], u) == [a]
    assert set(meet_closure([a, b], u)) == {a, b}


def test_meet_closure_incomparable_pair_has_four_elements():
    g = line_ground(["p", "q"])
    a, b = Observer(g, [1, "1/4"]), Observer(g, ["1/2", 1])
    elems = meet_closure([a, b], observer_universe([a, b], "open-world"))
    assert set(elems) == {a, b, obs_meet(a, b), obs_join(a, b)}


def test_meet_closure_idempotent():
    g = line_ground(["p", "q", "r"])
    seed = [Observer(g, [1, 0, "1/2"]), Observer(g, [0, "1/3", 1]), Observer(g, ["1/2", "1/2", 0])]
    once = meet_closure(seed, observer_universe(seed, "open-world"))
    twice = meet_closure(once, observer_universe(once))
    assert set(once) == set(twice)


def test_meet_closure_budget():
    g = line_ground([f"p{i}" for i in range(6)])
    seed = [Observer(g, [1 if i == j else 0 for i in range(6)]) for j in range(6)]
    with pytest.raises(BudgetExceeded):
        meet_closure(seed, observer_universe(seed, "open-world"), cap=20)


# triple observers: lessons as dims, second and third slots free


def triple_ground():
    return GroundSet(("x1", "x2"), ("f1", "r", "q"))


def test_displayed_componentwise_ops_give_singleton_sup():
    g = triple_ground()
    a = Observer(g, ["1/2", 0, 1, "1/4", 1, 0])
    b = Observer(g, ["1/4", 1, 0, "1/2", 0, 1])
    space = CompleteObserverSpace(g)
    assert space.sup_set([a, b]) == [obs_join(a, b)]


def test_projective_ops_non_commutative_non_singleton_sup():
    g = triple_ground()
    join, meet = projective_ops({"r", "q"})
    a = Observer(g, ["1/2", 0, 1, "1/4", 1, 0])
    b = Observer(g, ["1/4", 1, 0, "1/2", 0, 1])
    variants = []
    for r, q in itertools.product([0, 1], repeat=2):
        variants.append(Observer(g, ["1/2", r, q, "1/2", r, q]))
    u = AlgebraUniverse(list(dict.fromkeys([a, b] + variants)), join, meet, "open-world")
    sups = u.sup_set([a, b])
    assert len(sups) >= 2
    assert all(s.at("x1", "f1") == Fr(1, 2) for s in sups)
    assert meet(a, b) != meet(b, a)
    rep = check_axioms(u)
    assert rep.all_hold and not rep.meet_commutative


levels = st.sampled_from([Fr(0), Fr(1, 3), Fr(1, 2), Fr(2, 3), Fr(1)])
G3 = line_ground(["a", "b", "c"])
observers = st.lists(levels, min_size=3, max_size=3).map(lambda v: Observer(G3, v))


@settings(max_examples=60, deadline=None)
@given(st.lists(observers, min_size=1, max_size=6, unique=True))
def test_pointwise_axioms_on_small_universes(seed):
    elems = meet_closure(seed, observer_universe(seed, "open-world"), cap=2000)
    triples = itertools.product(seed, repeat=3)
    rep = check_triples(obs_join, obs_meet, triples, mode="exhaustive")
    assert rep.all_hold and rep.meet_commutative
    assert len(elems) >= len(seed)


@settings(max_examples=60, deadline=None)
@given(st.lists(observers, min_size=1, max_size=5, unique=True))
def test_mutual_minimality_of_sup_set(fam):
    elems = meet_closure(fam, observer_universe(fam, "open-world"), cap=2000)
    u = AlgebraUniverse(elems, obs_join, obs_meet)
    sups = u.sup_set_by_definition(fam)
    assert sups == u.sup_set(fam)
    for s, s2 in itertools.product(sups, repeat=2):
        assert obs_meet(s, s2) == s
