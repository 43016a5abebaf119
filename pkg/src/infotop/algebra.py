"""Two-operation algebras over finite universes.

An :class:`AlgebraUniverse` bundles an explicit, finite collection of elements
with a join and a meet.  Neither operation is assumed to be commutative, so
every definition here keeps operand order fixed: the family member always
sits on the left of the meet (``meet(G, S) == G``).
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

from .errors import BudgetExceeded, ClosureViolation, NotInUniverse

CLOSED = "closed"
OPEN_WORLD = "open-world"

DEFAULT_CLOSURE_CAP = 100_000


def _axiom_i(join, meet, a, b, c):
    return [
        (join(a, join(b, c)), join(join(a, b), c)),
        (meet(a, meet(b, c)), meet(meet(a, b), c)),
    ]


def _axiom_ii(join, meet, a, b, c):
    return [(join(a, meet(a, b)), a), (meet(a, join(b, a)), a)]


def _axiom_iii(join, meet, a, b, c):
    return [(join(a, a), a), (meet(a, a), a)]


def _axiom_iv(join, meet, a, b, c):
    return [
        (meet(a, join(b, c)), join(meet(a, b), meet(a, c))),
        (meet(join(b, c), a), join(meet(b, a), meet(c, a))),
    ]


def _axiom_v(join, meet, a, b, c):
    return [
        (join(a, meet(b, c)), meet(join(a, b), join(a, c))),
        (join(meet(b, c), a), meet(join(b, a), join(c, a))),
    ]


def _meet_commutes(join, meet, a, b, c):
    return [(meet(a, b), meet(b, a))]


AXIOMS: dict[str, Callable] = {
    "i": _axiom_i,
    "ii": _axiom_ii,
    "iii": _axiom_iii,
    "iv": _axiom_iv,
    "v": _axiom_v,
}

EQUATIONS = {
    "i": ("F v (G v H) = (F v G) v H", "F ^ (G ^ H) = (F ^ G) ^ H"),
    "ii": ("F v (F ^ G) = F", "F ^ (G v F) = F"),
    "iii": ("F v F = F", "F ^ F = F"),
    "iv": ("F ^ (G v H) = (F ^ G) v (F ^ H)", "(G v H) ^ F = (G ^ F) v (H ^ F)"),
    "v": ("F v (G ^ H) = (F v G) ^ (F v H)", "(G ^ H) v F = (G v F) ^ (H v F)"),
    "meet-commutative": ("F ^ G = G ^ F",),
}


class AlgebraUniverse:
    """A finite explicit element list with a join and a meet.

    ``encoder``, when given, maps an element to a flat tuple of rationals and
    asserts that join and meet act on those tuples as entrywise max and min.
    It unlocks the closed-form supremum (the fold of joins) whenever the
    element list is closed under join, and the bitmask cover kernels.
    """

    def __init__(
        self,
        elements: Iterable,
        join: Callable[[Any, Any], Any],
        meet: Callable[[Any, Any], Any],
        closure_mode: str = CLOSED,
        encoder: Callable[[Any], tuple] | None = None,
    ):
        elems = tuple(elements)
        if not elems:
            raise ValueError("universe must be non-empty")
        if closure_mode not in (CLOSED, OPEN_WORLD):
            raise ValueError(f"unknown closure mode {closure_mode!r}")
        index = {}
        for i, e in enumerate(elems):
            if e in index:
                raise ValueError(f"duplicate element at positions {index[e]} and {i}")
            index[e] = i
        self.elements = elems
        self.join = join
        self.meet = meet
        self.closure_mode = closure_mode
        self.encoder = encoder
        self._index = index
        self._join_closed: bool | None = None

    finite = True

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        try:
            return x in self._index
        except TypeError:
            return False

    def __repr__(self):
        return f"AlgebraUniverse({len(self.elements)} elements, {self.closure_mode})"

    def index(self, x) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise NotInUniverse(f"{x!r} is not an element of the universe") from None

    def require(self, family: Iterable) -> list:
        fam = list(family)
        for g in fam:
            if g not in self:
                raise NotInUniverse(f"{g!r} is not an element of the universe")
        return fam

    def is_join_closed(self) -> bool:
        if self._join_closed is None:
            self._join_closed = all(
                self.join(a, b) in self for a in self.elements for b in self.elements
            )
        return self._join_closed

    @property
    def lub_is_cellwise(self) -> bool:
        """True when the supremum of a finite family is its entrywise max."""
        return self.encoder is not None and self.is_join_closed()

    def sup_set(self, family: Iterable) -> list:
        fam = self.require(family)
        if not fam:
            raise ValueError("sup_set needs a non-empty family")
        if self.lub_is_cellwise:
            acc = fam[0]
            for g in fam[1:]:
                acc = self.join(acc, g)
            return [acc]
        return self.sup_set_by_definition(fam)

    def sup_set_by_definition(self, family: Sequence) -> list:
        """Scan the element list against the two defining conditions."""
        meet = self.meet
        fam = list(dict.fromkeys(family))
        uppers = [h for h in self.elements if all(meet(g, h) == g for g in fam)]
        return [s for s in uppers if all(meet(s, h) == s for h in uppers)]

    def upper_bounds(self, family: Sequence) -> list:
        meet = self.meet
        return [h for h in self.elements if all(meet(g, h) == g for g in family)]

    def complements(self, g, top, bottom) -> list:
        """Every c with c = c^top, g v c = c v g = top, g ^ c = c ^ g = bottom."""
        join, meet = self.join, self.meet
        return [
            c
            for c in self.elements
            if meet(c, top) == c
            and join(g, c) == top
            and join(c, g) == top
            and meet(g, c) == bottom
            and meet(c, g) == bottom
        ]


def sup_set(family: Iterable, universe) -> list:
    """Least dominating elements of ``family`` inside ``universe``.

    Returns the elements S with ``meet(G, S) == G`` for every family member G
    that are below (``meet(S, H) == S``) every other such dominator H.  The
    result may be empty or hold several elements when the meet is not
    commutative.
    """
    return universe.sup_set(family)


@dataclass
class AxiomVerdict:
    name: str
    status: str  # "holds" | "fails" | "sampled"
    checked: int
    counterexample: tuple | None = None
    equation: str | None = None

    @property
    def failed(self) -> bool:
        return self.status == "fails"


@dataclass
class AxiomReport:
    mode: str  # "exhaustive" | "sampled"
    triples_checked: int
    verdicts: dict[str, AxiomVerdict] = field(default_factory=dict)

    @property
    def all_hold(self) -> bool:
        return all(not v.failed for k, v in self.verdicts.items() if k in AXIOMS)

    @property
    def meet_commutative(self) -> bool:
        return not self.verdicts["meet-commutative"].failed

    def lines(self) -> list[str]:
        out = []
        for name, v in self.verdicts.items():
            tag = {"holds": "PASS", "sampled": "PASS (sampled)", "fails": "FAIL"}[v.status]
            line = f"axiom {name}: {tag} [{v.checked} checked]"
            if v.failed:
                line += f" counterexample {v.counterexample!r} violates {v.equation}"
            out.append(line)
        return out


def recheck(verdict: AxiomVerdict, join, meet) -> bool:
    """Re-evaluate a failed verdict's counterexample; True if it still violates."""
    if verdict.counterexample is None:
        return False
    fn = AXIOMS.get(verdict.name, _meet_commutes)
    return any(lhs != rhs for lhs, rhs in fn(join, meet, *verdict.counterexample))


def _guarded(op, universe: AlgebraUniverse, label: str):
    if universe.closure_mode != CLOSED:
        return op

    def checked(a, b):
        r = op(a, b)
        if r not in universe:
            raise ClosureViolation(f"{label}({a!r}, {b!r}) = {r!r} leaves the universe")
        return r

    return checked


def check_triples(join, meet, triples: Iterable[tuple], mode: str = "sampled") -> AxiomReport:
    """Evaluate the five axioms and meet commutativity on explicit triples."""
    names = list(AXIOMS) + ["meet-commutative"]
    fns = dict(AXIOMS, **{"meet-commutative": _meet_commutes})
    counts = dict.fromkeys(names, 0)
    failures: dict[str, tuple] = {}
    n = 0
    for t in triples:
        n += 1
        for name in names:
            if name in failures:
                continue
            counts[name] += 1
            for k, (lhs, rhs) in enumerate(fns[name](join, meet, *t)):
                if lhs != rhs:
                    failures[name] = (t, EQUATIONS[name][k])
                    break
    clean = "holds" if mode == "exhaustive" else "sampled"
    report = AxiomReport(mode=mode, triples_checked=n)
    for name in names:
        if name in failures:
            t, eq = failures[name]
            report.verdicts[name] = AxiomVerdict(name, "fails", counts[name], t, eq)
        else:
            report.verdicts[name] = AxiomVerdict(name, clean, counts[name])
    return report


def check_axioms(universe: AlgebraUniverse, sample_budget: int = 1_000_000, seed: int = 0) -> AxiomReport:
    """Check axioms (i)-(v) and meet commutativity over a universe.

    Exhaustive over all ordered triples when ``len(universe)**3 <= sample_budget``;
    otherwise ``sample_budget`` uniformly drawn triples, and every clean
    verdict is marked ``sampled``.  Raises :class:`ClosureViolation` in closed
    mode as soon as an operation leaves the element list.
    """
    if sample_budget < 1:
        raise ValueError("sample_budget must be >= 1")
    elems = universe.elements
    join = _guarded(universe.join, universe, "join")
    meet = _guarded(universe.meet, universe, "meet")
    if len(elems) ** 3 <= sample_budget:
        triples = itertools.product(elems, repeat=3)
        return check_triples(join, meet, triples, mode="exhaustive")
    rng = random.Random(seed)
    triples = (tuple(rng.choice(elems) for _ in range(3)) for _ in range(sample_budget))
    return check_triples(join, meet, triples, mode="sampled")


def meet_closure(seed: Iterable, universe: AlgebraUniverse, cap: int = DEFAULT_CLOSURE_CAP) -> list:
    """Smallest superset of ``seed`` closed under join and meet (both orders).

    Seeds outside the universe are accepted only in open-world mode.
    """
    seed = list(seed)
    if universe.closure_mode == CLOSED:
        universe.require(seed)
    return closure(seed, universe.join, universe.meet, cap)


def closure(seed: Iterable, join, meet, cap: int = DEFAULT_CLOSURE_CAP) -> list:
    items = list(dict.fromkeys(seed))
    known = set(items)
    frontier = list(items)
    while frontier:
        fresh = []
        for x in frontier:
            for y in list(items):
                for r in (join(x, y), join(y, x), meet(x, y), meet(y, x)):
                    if r not in known:
                        known.add(r)
                        items.append(r)
                        fresh.append(r)
                        if len(items) > cap:
                            raise BudgetExceeded(f"closure exceeded {cap} elements")
        frontier = fresh
    return items
