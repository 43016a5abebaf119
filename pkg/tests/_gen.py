"""Seeded generators for small observer topologies and covers."""
import itertools
import random
from fractions import Fraction

from infotop.algebra import closure
from infotop.errors import BudgetExceeded
from infotop.covers import covers, make_cover
from infotop.observers import GroundSet, Observer, obs_join, obs_meet, observer_universe
from infotop.topology import Topology

LEVELS = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]


def random_observer(rng, ground, levels=LEVELS):
    return Observer(ground, [rng.choice(levels) for _ in range(ground.size)])


def random_topology(rng, max_universe=12, max_opens=8, points=("a", "b", "c")):
    """A valid finite topology inside a join/meet-closed universe."""
    ground = GroundSet(tuple(points), ("level",))
    while True:
        seed = [random_observer(rng, ground) for _ in range(rng.randint(2, 4))]
        try:
            elems = closure(seed, obs_join, obs_meet, cap=max_universe)
        except BudgetExceeded:
            continue
        pick = [e for e in elems if rng.random() < 0.5] or [rng.choice(elems)]
        try:
            opens = closure(pick, obs_join, obs_meet, cap=max_opens)
        except BudgetExceeded:
            continue
        F, O = opens[0], opens[0]
        for g in opens[1:]:
            F, O = obs_join(F, g), obs_meet(O, g)
        return Topology(observer_universe(elems), F, opens, O)


def random_subset(rng, items):
    return [x for x in items if rng.random() < 0.5] or [rng.choice(items)]


def random_cover(rng, t, target=None, tries=200):
    """A random cover of ``target`` (default F) drawn from the opens."""
    target = t.F if target is None else target
    opens = list(t.opens)
    for _ in range(tries):
        sub = random_subset(rng, opens)
        if covers(sub, target, t):
            return make_cover(target, sub, t)
    return make_cover(target, [t.F], t)


def all_subsets(items):
    items = list(items)
    for r in range(1, len(items) + 1):
        yield from itertools.combinations(items, r)


def rng(seed=0):
    return random.Random(seed)
