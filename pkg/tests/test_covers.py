import itertools
import math
from fractions import Fraction as Fr
from pathlib import Path

import pytest

from _gen import all_subsets, random_cover, random_topology, rng
from infotop.algebra import AlgebraUniverse
from infotop.covers import (
    check_compact_join,
    check_conjugacy,
    check_product_compact,
    check_pullback_compact,
    cover_entropy,
    cover_join,
    cover_pullback,
    cover_union_refine,
    covers,
    enumerate_covers,
    is_compact,
    make_cover,
    map_entropy,
    min_subcover,
    system_entropy,
)
from infotop.defs import Workspace, load
from infotop.errors import (
    HypothesisNotMet,
    HypothesisViolation,
    NonCommutativeMeet,
    NotACover,
    NotIntertwining,
    SizeCapExceeded,
    TargetMismatch,
)
from infotop.observers import Observer, embed_classical, line_ground, obs_join, obs_meet, observer_universe
from infotop.scenarios import build_shift_scenario_finite
from infotop.topology import PointMap, Topology, pullback_space

DEFS = Path(__file__).resolve().parent.parent / "examples_defs"
G1 = line_ground(["p"])


def S(v):
    return Observer(G1, [v])


def scalar_top(vals, universe=None):
    opens = [S(v) for v in vals]
    u = observer_universe([S(v) for v in (universe or vals)])
    return Topology(u, opens[-1], opens, opens[0])


def generic_top(vals):
    """Same scalars, but the universe has no encoder: exercises the search route."""
    elems = [S(v) for v in vals]
    u = AlgebraUniverse(elems, obs_join, obs_meet)
    return Topology(u, elems[-1], elems, elems[0])


@pytest.fixture
def half():
    return scalar_top([0, "1/2", 1])


def test_make_cover_examples(half):
    c = make_cover(S(1), [S("1/2"), S(1)], half)
    assert c.witness == S(1)
    assert make_cover(half.F, [half.F], half).witness == half.F
    with pytest.raises(NotACover):
        make_cover(S(1), [S(0), S("1/2")], half)


def test_non_open_member_rejected(half):
    with pytest.raises(NotACover):
        make_cover(S(1), [S("1/4"), S(1)], scalar_top([0, "1/2", 1], [0, "1/4", "1/2", 1]))


def test_min_subcover_examples(half):
    sub = min_subcover(make_cover(S(1), [S("1/2"), S(1)], half), half)
    assert sub.count == 1 and sub.members == (S(1),)
    assert min_subcover(make_cover(half.F, [half.F], half), half).count == 1


def test_min_subcover_search_route_agrees():
    t = generic_top([0, "1/2", 1])
    sub = min_subcover(make_cover(S(1), [S("1/2"), S(1)], t), t)
    assert sub.count == 1 and sub.method == "cardinality search"


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_shift_peaks_need_all_members(k):
    scn = build_shift_scenario_finite(k)
    peaks = next(c for c in scn.catalog if c.name == "peaks")
    assert min_subcover(peaks, scn.topology).count == k


def test_min_subcover_is_certified_minimal():
    r = rng(11)
    for _ in range(15):
        t = random_topology(r)
        c = random_cover(r, t)
        if len(c.members) > 12:
            continue
        sub = min_subcover(c, t)
        assert covers(sub.members, c.target, t)
        for smaller in itertools.combinations(c.members, sub.count - 1):
            assert not smaller or not covers(smaller, c.target, t)


def test_cover_entropy_values(half):
    assert cover_entropy(make_cover(half.F, [half.F], half), half).log == 0
    ws = Workspace(load(DEFS / "marks.def"))
    pair, three = ws.cover("pair"), ws.cover("three")
    assert cover_entropy(pair, ws.topology("tau")).n == 2
    assert cover_entropy(pair, ws.topology("tau")).log == pytest.approx(0.6931, abs=1e-4)
    e3 = cover_entropy(three, ws.topology("lessons"))
    assert e3.n == 3 and e3.log == pytest.approx(math.log(3))


def test_cover_join_examples():
    t = scalar_top([0, "1/4", "1/2", 1])
    a = make_cover(S(1), [S("1/2"), S(1)], t)
    b = make_cover(S(1), [S("1/4"), S(1)], t)
    ab = cover_join(a, b, t)
    assert set(ab.members) == {S("1/4"), S("1/2"), S(1)}
    assert ab.witness == S(1)
    assert set(cover_join(a, a, t).members) == set(a.members)
    triv = make_cover(t.F, [t.F], t)
    assert set(cover_join(a, triv, t).members) == set(a.members)


def test_cover_join_target_mismatch():
    t = scalar_top([0, "1/2", 1])
    a = make_cover(S(1), [S(1)], t)
    b = make_cover(S("1/2"), [S("1/2")], t)
    with pytest.raises(TargetMismatch):
        cover_join(a, b, t)


def test_cover_join_needs_commutative_meet():
    elems = [S(0), S("1/2"), S(1)]
    u = AlgebraUniverse(elems, obs_join, lambda a, b: a)
    t = Topology(u, S(1), elems, S(0))
    c = make_cover(S(1), [S(1)], t)
    with pytest.raises(NonCommutativeMeet):
        cover_join(c, c, t)


def test_union_refine():
    t = scalar_top([0, "1/4", "1/2", 1])
    a = make_cover(S(1), [S("1/2"), S(1)], t)
    b = make_cover(S(1), [S("1/4"), S(1)], t)
    u = cover_union_refine(a, b, t)
    assert covers(u.members, S(1), t)
    assert cover_entropy(u, t).n <= cover_entropy(a, t).n * cover_entropy(b, t).n


def test_pullback_identity_and_relabel():
    scn = build_shift_scenario_finite(3)
    t = scn.topology
    peaks = next(c for c in scn.catalog if c.name == "peaks")
    ident = PointMap.identity(t.F.ground.points)
    assert set(cover_pullback(peaks, ident, t).members) == set(peaks.members)
    shifted = cover_pullback(peaks, scn.f, t)
    assert set(shifted.members) == set(peaks.members)


def test_join_count_bounded_by_product():
    r = rng(5)
    checked = 0
    while checked < 40:
        t = random_topology(r)
        a, b = random_cover(r, t), random_cover(r, t)
        n = cover_entropy(cover_join(a, b, t), t).n
        assert n <= cover_entropy(a, t).n * cover_entropy(b, t).n
        checked += 1


def test_compact_finite_and_families():
    t = scalar_top([0, "1/2", 1])
    v = is_compact(t.F, t)
    assert v and v.cover is not None
    tau = Workspace(load(DEFS / "nonfamily.def")).topology("tau")
    v = is_compact(tau.F, tau)
    assert not v and v.witness_sequence


def test_compact_scale_family_least_scale():
    from infotop.observers import CompleteObserverSpace, ScaleFamily

    g = line_ground(["a", "b"])
    mu = Observer(g, ["1/2", 1])
    fam = ScaleFamily(mu, Fr(1, 4), 1)
    t = Topology(CompleteObserverSpace(g), mu, fam, fam.member(Fr(1, 4)))
    assert is_compact(fam.member(Fr(1, 4)), t)
    v = is_compact(mu, t)
    assert not v and v.witness_sequence[-1] < 1


def test_enumerate_covers_matches_brute_force():
    t = scalar_top([0, "1/4", "1/2", 1])
    found = {frozenset(c) for c in enumerate_covers(t.F, t)}
    brute = {frozenset(s) for s in all_subsets(t.opens) if covers(s, t.F, t)}
    assert found == brute


def test_compact_join_on_scalars():
    t = scalar_top([0, "1/4", "1/2", 1])
    assert check_compact_join(S("1/2"), S("1/2"), t).holds
    v = check_compact_join(S("1/4"), S("1/2"), t)
    assert v.holds and v.inclusion_holds


def test_product_compact():
    emb = embed_classical(["a", "b"], [[], ["a"], ["b"], ["a", "b"]])
    v = check_product_compact([emb.topology(), emb.topology()])
    assert v.holds and v.product_compact and v.shape_equivalence


def test_pullback_compact_bijective_and_collapsing():
    x = embed_classical(["a", "b"], [[], ["a"], ["a", "b"]]).topology()
    f = PointMap.from_dict({"u": "b", "v": "a"}, target=["a", "b"])
    y = pullback_space(f, x)
    assert check_pullback_compact(x.F, f, x, y).holds
    const = PointMap.from_dict({"u": "a", "v": "a"}, target=["a", "b"])
    with pytest.raises(HypothesisNotMet):
        check_pullback_compact(x.F, const, x, pullback_space(const, x))


def test_pullback_compact_non_injective_separating():
    x = embed_classical(["a", "b"], [[], ["a"], ["a", "b"]]).topology()
    f = PointMap.from_dict({"u": "a", "v": "a", "w": "b"}, target=["a", "b"])
    y = pullback_space(f, x)
    assert check_pullback_compact(x.F, f, x, y).holds


def test_identity_map_entropy():
    scn = build_shift_scenario_finite(3)
    t = scn.topology
    ident = PointMap.identity(t.F.ground.points)
    peaks = next(c for c in scn.catalog if c.name == "peaks")
    tr = map_entropy(ident, peaks, t, n_max=5)
    assert tr.N == [3] * 5
    assert tr.estimate == pytest.approx(math.log(3) / 5)
    assert not tr.converged
    assert tr.limit == 0


def test_entropy_hypothesis_and_caps():
    scn = build_shift_scenario_finite(3)
    t = scn.topology
    peaks = next(c for c in scn.catalog if c.name == "peaks")
    with pytest.raises(SizeCapExceeded):
        map_entropy(scn.f, peaks, t, n_max=3, size_cap=1)
    lower = make_cover(peaks.members[0], [peaks.members[0]], t)
    with pytest.raises(TargetMismatch):
        map_entropy(scn.f, lower, t)
    g = line_ground(["a", "b"])
    F = Observer(g, [1, "1/2"])
    tt = Topology(observer_universe([F, Observer(g, [0, 0])]), F, [Observer(g, [0, 0]), F], Observer(g, [0, 0]))
    swap = PointMap.from_dict({"a": "b", "b": "a"})
    with pytest.raises(HypothesisViolation):
        map_entropy(swap, make_cover(F, [F], tt), tt)


def test_system_entropy_monotone_in_catalog():
    scn = build_shift_scenario_finite(3)
    t = scn.topology
    triv = [c for c in scn.catalog if c.name == "trivial"]
    small = system_entropy(scn.f, triv, t, n_max=4)
    full = system_entropy(scn.f, scn.catalog, t, n_max=4)
    assert small.value == 0
    assert full.value >= small.value and full.certified


def test_conjugacy_identity_and_failure():
    scn = build_shift_scenario_finite(3)
    t = scn.topology
    pts = t.F.ground.points
    ident = PointMap.identity(pts)
    assert check_conjugacy(scn.f, scn.f, ident, t, t, scn.catalog, n_max=4).holds
    with pytest.raises(NotIntertwining):
        check_conjugacy(scn.f, ident, ident, t, t, scn.catalog, n_max=4)
