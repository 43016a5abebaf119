import itertools
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infotop.errors import AmbiguousWitness, GroundMismatch, NotATopology, ScaleOutOfRange
from infotop.observers import (
    GroundSet,
    Observer,
    ScaleFamily,
    embed_classical,
    family_member,
    line_ground,
    obs_join,
    obs_meet,
    obs_scale,
    one,
    zero,
)
from infotop.rational import decimal, render, scalar
from infotop.topology import validate_topology

POINTS = ("x1", "x2", "x3", "x4", "x5", "x6")
T = ["95/100", "96/100", "99/100", "88/100", "88/100", "91/100"]
A = ["80/100", "93/100", "87/100", "87/100", "85/100", "88/100"]


@pytest.fixture
def columns():
    g = line_ground(POINTS)
    return Observer(g, T), Observer(g, A)


def test_scalar_parsing_is_exact():
    assert scalar("0.95") == Fr(19, 20)
    assert scalar(0.1) == Fr(1, 10)
    assert scalar("3/4") == Fr(3, 4)
    assert render(Fr(6, 8)) == "3/4"
    assert decimal(Fr(1, 3)) == "0.333333333333"
    with pytest.raises(TypeError):
        scalar(True)


def test_entries_outside_unit_interval_rejected():
    with pytest.raises(ValueError):
        Observer(line_ground(["p"]), ["3/2"])


def test_join_meet_on_table_columns(columns):
    fT, fA = columns
    assert obs_join(fT, fA).at("x1", "level") == Fr(95, 100)
    assert obs_meet(fT, fA).at("x4", "level") == Fr(87, 100)


def test_identities(columns):
    fT, _ = columns
    g = fT.ground
    assert obs_join(fT, fT) == fT == obs_meet(fT, fT)
    assert obs_join(fT, zero(g)) == fT
    assert obs_meet(fT, one(g)) == fT


def test_ground_mismatch():
    a = Observer(line_ground(["p"]), [1])
    b = Observer(line_ground(["q"]), [1])
    with pytest.raises(GroundMismatch):
        obs_join(a, b)


def test_scaling(columns):
    fT, _ = columns
    assert obs_scale(1, fT) == fT
    assert obs_scale(0, fT) == zero(fT.ground)
    half = obs_scale(Fr(1, 2), fT)
    assert half.at("x3", "level") == Fr(99, 200)
    assert half.at("x3", "level").numerator * 200 == 99 * half.at("x3", "level").denominator * 1
    with pytest.raises(ScaleOutOfRange):
        obs_scale(Fr(3, 2), fT)


def test_family_membership():
    g = line_ground(["a", "b"])
    mu = Observer(g, ["1/2", 1])
    fam = ScaleFamily(mu)
    m = family_member(fam, obs_scale(Fr(1, 2), mu))
    assert m.member and m.scale == Fr(1, 2)
    assert not family_member(ScaleFamily(mu, 0, Fr(1, 2)), obs_scale(Fr(3, 4), mu))
    assert not family_member(fam, Observer(g, ["1/4", "3/4"]))


def test_family_free_dims_unconstrained():
    g = GroundSet(("x1", "x2"), ("f1", "r"))
    base = Observer(g, ["1/2", 0, 1, 0])
    fam = ScaleFamily(base, Fr(1, 2), 1, {"r"})
    cand = Observer(g, ["1/4", "2/3", "1/2", 1])
    m = family_member(fam, cand)
    assert m.member and m.scale == Fr(1, 2)


def test_family_ambiguous_witness():
    g = line_ground(["a"])
    with pytest.raises(AmbiguousWitness):
        family_member(ScaleFamily(zero(g)), zero(g))


@settings(max_examples=50, deadline=None)
@given(st.fractions(min_value=0, max_value=1, max_denominator=50))
def test_family_member_recovers_scale(r):
    g = line_ground(["a", "b", "c"])
    base = Observer(g, ["1/3", 1, 0])
    m = family_member(ScaleFamily(base), obs_scale(r, base))
    assert m.member and m.scale == r


def test_discrete_embedding_two_points():
    emb = embed_classical(["p", "q"], [[], ["p"], ["q"], ["p", "q"]])
    assert len(emb.observers) == 4
    assert validate_topology(emb.topology()).valid


def test_indiscrete_embedding():
    emb = embed_classical(["p", "q"], [[], ["p", "q"]])
    t = emb.topology()
    assert len(emb.observers) == 2
    assert validate_topology(t).valid
    assert t.O == emb.char([])


def test_missing_union_rejected():
    with pytest.raises(NotATopology) as err:
        embed_classical(["p", "q", "r"], [[], ["p"], ["q"], ["p", "q", "r"]])
    assert err.value.pair is not None


def test_embedding_is_a_homomorphism():
    emb = embed_classical(["a", "b", "c"], [[], ["a"], ["a", "b"], ["c"], ["a", "c"], ["a", "b", "c"]])
    for u, v in itertools.combinations(emb.sets, 2):
        assert emb.char(u & v) == obs_meet(emb.chi[u], emb.chi[v])
        assert emb.char(u | v) == obs_join(emb.chi[u], emb.chi[v])
