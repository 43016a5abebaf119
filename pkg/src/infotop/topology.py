"""F-topologies: validation, interiors, closed systems, maps and products.

Point maps follow the pull-back convention: a map ``f: Y -> X`` sends an
observer ``H`` on ``X`` to ``H o f`` on ``Y``, evaluated as ``H(f(y))``.
``compose(f, g)`` is the map ``z -> f(g(z))``.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .algebra import CLOSED, AlgebraUniverse
from .errors import (
    BudgetExceeded,
    EmptyInteriorFamily,
    GroundMismatch,
    IncompatibleIndexSets,
    InvalidTopology,
    NoComplement,
    NonUniqueComplement,
    TheoremViolation,
    Undecidable,
)
from .observers import (
    CompleteObserverSpace,
    DownSetFamily,
    GroundSet,
    Observer,
    ScaleFamily,
    family_member,
    zero,
)
from .rational import ONE, ZERO, render

SUBSET_CAP = 12
SUBSET_SAMPLES = 2000


# ---------------------------------------------------------------- point maps


@dataclass(frozen=True)
class PointMap:
    """Total function between finite point lists, stored as an image table."""

    source: tuple[str, ...]
    target: tuple[str, ...]
    images: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        object.__setattr__(self, "images", tuple(self.images))
        if len(self.images) != len(self.source):
            raise ValueError("image table must list one image per source point")
        tset = set(self.target)
        bad = [p for p in self.images if p not in tset]
        if bad:
            raise ValueError(f"images {bad} are not target points")

    @classmethod
    def from_dict(cls, mapping: dict, source: Sequence[str] | None = None, target: Sequence[str] | None = None):
        src = tuple(source) if source is not None else tuple(mapping)
        missing = [p for p in src if p not in mapping]
        if missing:
            raise ValueError(f"map is not total: no image for {missing}")
        tgt = tuple(target) if target is not None else src
        return cls(src, tgt, tuple(mapping[p] for p in src))

    @classmethod
    def identity(cls, points: Sequence[str]):
        pts = tuple(points)
        return cls(pts, pts, pts)

    def __call__(self, p: str) -> str:
        return self.images[self.source.index(p)]

    def as_dict(self) -> dict:
        return dict(zip(self.source, self.images))

    def index_table(self) -> list[int]:
        pos = {p: i for i, p in enumerate(self.target)}
        return [pos[q] for q in self.images]

    @property
    def is_bijective(self) -> bool:
        return len(self.source) == len(self.target) and set(self.images) == set(self.target)

    def inverse(self) -> "PointMap":
        if not self.is_bijective:
            raise ValueError("map is not a bijection")
        back = {q: p for p, q in zip(self.source, self.images)}
        return PointMap(self.target, self.source, tuple(back[q] for q in self.target))

    def power(self, k: int) -> "PointMap":
        if self.source != self.target and set(self.source) != set(self.target):
            raise ValueError("only self-maps have powers")
        out = PointMap.identity(self.source)
        for _ in range(k):
            out = compose(self, out)
        return out


def compose(f: PointMap, g: PointMap) -> PointMap:
    """The map ``z -> f(g(z))``."""
    if set(g.target) != set(f.source):
        raise GroundMismatch("g's target points differ from f's source points")
    fd = f.as_dict()
    return PointMap(g.source, f.target, tuple(fd[q] for q in g.images))


def pull_back(h, f: PointMap):
    """``h o f`` for an observer ``h`` on f's target points."""
    if not isinstance(h, Observer):
        raise TypeError("only observers can be pulled back along point maps")
    g = h.ground
    if g.points != f.target:
        if set(g.points) != set(f.target):
            raise GroundMismatch("observer ground does not match the map's target")
    k = len(g.dims)
    pos = {p: i for i, p in enumerate(g.points)}
    ground = GroundSet(f.source, g.dims)
    vals = []
    for q in f.images:
        i = pos[q] * k
        vals.extend(h.values[i : i + k])
    return Observer._raw(ground, tuple(vals))


# ----------------------------------------------------------------- products


class ProductElement:
    """Tuple of factor elements with componentwise operations."""

    __slots__ = ("parts", "_hash")

    def __init__(self, parts: Iterable):
        self.parts = tuple(parts)
        self._hash = hash(self.parts)

    def __eq__(self, other):
        return isinstance(other, ProductElement) and self.parts == other.parts

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "Product(" + ", ".join(map(repr, self.parts)) + ")"


class ProductUniverse:
    """Cartesian product of factor universes with componentwise join/meet."""

    def __init__(self, factors: Sequence):
        self.factors = tuple(factors)
        if not self.factors:
            raise ValueError("product needs at least one factor")
        self.finite = all(getattr(u, "finite", False) for u in self.factors)
        self.closure_mode = CLOSED if all(u.closure_mode == CLOSED for u in self.factors) else "open-world"
        encs = [getattr(u, "encoder", None) for u in self.factors]
        if all(e is not None for e in encs):
            def encoder(x):
                out = ()
                for e, part in zip(encs, x.parts):
                    out += tuple(e(part))
                return out
            self.encoder = encoder
        else:
            self.encoder = None
        self._elements = None

    @property
    def elements(self):
        if not self.finite:
            return None
        if self._elements is None:
            self._elements = tuple(ProductElement(p) for p in itertools.product(*(u.elements for u in self.factors)))
        return self._elements

    @property
    def lub_is_cellwise(self) -> bool:
        return all(getattr(u, "lub_is_cellwise", False) for u in self.factors)

    def join(self, a: ProductElement, b: ProductElement) -> ProductElement:
        return ProductElement(u.join(x, y) for u, x, y in zip(self.factors, a.parts, b.parts))

    def meet(self, a: ProductElement, b: ProductElement) -> ProductElement:
        return ProductElement(u.meet(x, y) for u, x, y in zip(self.factors, a.parts, b.parts))

    def __contains__(self, x):
        return (
            isinstance(x, ProductElement)
            and len(x.parts) == len(self.factors)
            and all(p in u for p, u in zip(x.parts, self.factors))
        )

    def __len__(self):
        return len(self.elements)

    def require(self, family):
        from .errors import NotInUniverse

        fam = list(family)
        for g in fam:
            if g not in self:
                raise NotInUniverse(f"{g!r} is not in the product universe")
        return fam

    def sup_set(self, family) -> list:
        """Product of the factor sup-sets of the projected family."""
        fam = self.require(family)
        if not fam:
            raise ValueError("sup_set needs a non-empty family")
        per = [u.sup_set([g.parts[a] for g in fam]) for a, u in enumerate(self.factors)]
        return [ProductElement(p) for p in itertools.product(*per)]

    def complements(self, g, top, bottom) -> list:
        per = [u.complements(x, t, b) for u, x, t, b in zip(self.factors, g.parts, top.parts, bottom.parts)]
        return [ProductElement(p) for p in itertools.product(*per)]


# ----------------------------------------------------------------- topology


@dataclass
class Topology:
    """A designated system ``F``, its opens, and the stored least open ``O``.

    ``opens`` is a finite tuple or a symbolic family
    (:class:`ScaleFamily`, :class:`DownSetFamily`).
    """

    universe: Any
    F: Any
    opens: Any
    O: Any

    def __post_init__(self):
        if not self.is_family:
            self.opens = tuple(dict.fromkeys(self.opens))
            self._open_set = set(self.opens)

    @property
    def is_family(self) -> bool:
        return isinstance(self.opens, (ScaleFamily, DownSetFamily))

    @property
    def join(self):
        return self.universe.join

    @property
    def meet(self):
        return self.universe.meet

    def is_member(self, x) -> bool:
        """Membership of ``x`` in the opens (exact, also for families)."""
        if isinstance(self.opens, ScaleFamily):
            if x not in self.universe:
                return False
            return family_member(self.opens, x).member
        if isinstance(self.opens, DownSetFamily):
            return x in self.universe and self.opens.contains(x)
        return x in self._open_set


@dataclass
class AxiomCheck:
    status: str  # "holds" | "fails" | "sampled"
    witness: Any = None
    note: str = ""


@dataclass
class TopologyVerdict:
    mode: str
    axioms: dict[str, AxiomCheck] = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return all(a.status != "fails" for a in self.axioms.values())

    @property
    def first_failure(self):
        for name, a in self.axioms.items():
            if a.status == "fails":
                return name, a
        return None

    def lines(self) -> list[str]:
        out = []
        for name, a in self.axioms.items():
            tag = {"holds": "PASS", "sampled": "PASS (sampled)", "fails": "FAIL"}[a.status]
            line = f"axiom {name}: {tag}"
            if a.note:
                line += f" ({a.note})"
            if a.status == "fails" and a.witness is not None:
                line += f" witness {a.witness!r}"
            out.append(line)
        return out


def validate_topology(
    t: Topology, subset_cap: int = SUBSET_CAP, samples: int | None = SUBSET_SAMPLES, seed: int = 0
) -> TopologyVerdict:
    """Check the four defining axioms; families go through parameter reasoning.

    Axiom (iv) quantifies over every non-empty subset of the opens.  It runs
    exhaustively up to ``subset_cap`` opens, then on ``samples`` random
    subsets (verdict ``sampled``), or raises :class:`BudgetExceeded` when
    ``samples`` is None.  Universes whose supremum is the entrywise max get an
    exact certificate from closure under pairwise joins instead.
    """
    if isinstance(t.opens, ScaleFamily):
        return _validate_scale_family(t)
    if isinstance(t.opens, DownSetFamily):
        return _validate_downset(t)
    join, meet = t.join, t.meet
    opens = t.opens
    v = TopologyVerdict(mode="finite")

    bad = next((g for g in opens if meet(g, t.F) != g), None)
    v.axioms["i"] = AxiomCheck("fails", bad, "G = G ^ F violated") if bad is not None else AxiomCheck("holds")

    if t.F not in t._open_set:
        v.axioms["ii"] = AxiomCheck("fails", t.F, "F is not open")
    elif t.O not in t._open_set:
        least = [o for o in opens if all(meet(o, g) == o for g in opens)]
        note = "stored O is not open" + ("" if least else "; no open is ^-least")
        v.axioms["ii"] = AxiomCheck("fails", least[0] if least else t.O, note)
    else:
        bad = next((g for g in opens if meet(t.O, g) != t.O), None)
        v.axioms["ii"] = AxiomCheck("fails", bad, "O = O ^ G violated") if bad is not None else AxiomCheck("holds")

    bad = next(((g, h) for g in opens for h in opens if meet(g, h) not in t._open_set), None)
    v.axioms["iii"] = AxiomCheck("fails", bad, "G ^ H not open") if bad is not None else AxiomCheck("holds")

    v.axioms["iv"] = _check_sup_axiom(t, subset_cap, samples, seed)
    return v


def _check_sup_axiom(t: Topology, subset_cap, samples, seed) -> AxiomCheck:
    opens = t.opens
    uni = t.universe
    if getattr(uni, "lub_is_cellwise", False):
        for g in opens:
            for h in opens:
                if uni.join(g, h) not in t._open_set:
                    return AxiomCheck("fails", (g, h), "sup of a pair is not open")
        return AxiomCheck("holds", note="join-closure certificate")

    def check(sub):
        s = uni.sup_set(sub)
        if not s:
            return AxiomCheck("fails", tuple(sub), "empty sup-set")
        out = [x for x in s if x not in t._open_set]
        if out:
            return AxiomCheck("fails", (tuple(sub), out[0]), "sup-set leaves the opens")
        return None

    n = len(opens)
    if n <= subset_cap:
        for r in range(1, n + 1):
            for sub in itertools.combinations(opens, r):
                bad = check(sub)
                if bad:
                    return bad
        return AxiomCheck("holds", note=f"all {2 ** n - 1} subsets")
    if samples is None:
        raise BudgetExceeded(f"{n} opens exceed the exhaustive cap {subset_cap} and sampling is off")
    rng = random.Random(seed)
    for _ in range(samples):
        sub = [g for g in opens if rng.random() < 0.5] or [rng.choice(opens)]
        bad = check(sub)
        if bad:
            return bad
    return AxiomCheck("sampled", note=f"{samples} random subsets")


def _family_universe_kind(t: Topology) -> str:
    uni = t.universe
    if not isinstance(uni, CompleteObserverSpace):
        raise Undecidable("family topologies need a complete observer space universe")
    return "projective" if uni.free_dims else "pointwise"


def _validate_scale_family(t: Topology) -> TopologyVerdict:
    fam: ScaleFamily = t.opens
    kind = _family_universe_kind(t)
    if kind == "projective" and t.universe.free_dims != fam.free_dims:
        raise Undecidable("free dims of the family and of the operations differ")
    v = TopologyVerdict(mode=f"scale-family ({kind})")
    base = fam.base
    cells = fam.constrained
    free = [i for i in range(base.ground.size) if i not in set(cells)]
    F = t.F

    # (i) r*b ^ F = r*b for all r <= hi  <=>  hi*b <= F on constrained entries
    over = next((i for i in cells if fam.hi * base.values[i] > F.values[i]), None)
    if over is not None:
        v.axioms["i"] = AxiomCheck("fails", fam.member(fam.hi), f"hi*base exceeds F at entry {over}")
    elif kind == "pointwise" and any(F.values[i] != ONE for i in free):
        i = next(i for i in free if F.values[i] != ONE)
        v.axioms["i"] = AxiomCheck("fails", i, "free entries range over [0, 1] but F is below 1 there")
    else:
        v.axioms["i"] = AxiomCheck("holds", note="hi*base <= F entrywise")

    # (ii) F and O are family members, O at scale lo
    mF = family_member(fam, F)
    mO = family_member(fam, t.O)
    if not mF.member:
        v.axioms["ii"] = AxiomCheck("fails", F, "F is not a member: " + mF.reason)
    elif not mO.member or mO.scale != fam.lo:
        v.axioms["ii"] = AxiomCheck("fails", t.O, f"O must be the scale-{render(fam.lo)} member")
    elif kind == "pointwise" and any(t.O.values[i] != ZERO for i in free):
        v.axioms["ii"] = AxiomCheck("fails", t.O, "O must vanish on free entries")
    else:
        v.axioms["ii"] = AxiomCheck("holds", note=f"O at scale {render(fam.lo)}")

    v.axioms["iii"] = AxiomCheck("holds", note="min of two scales stays in the closed range")
    v.axioms["iv"] = AxiomCheck("holds", note="sup of any scale set lies in the closed range")
    return v


def _validate_downset(t: Topology) -> TopologyVerdict:
    fam: DownSetFamily = t.opens
    if _family_universe_kind(t) != "pointwise":
        raise Undecidable("down-set families are supported for entrywise operations only")
    v = TopologyVerdict(mode="down-set family")
    v.axioms["i"] = (
        AxiomCheck("holds", note="every member lies below the cap")
        if t.F == fam.cap
        else AxiomCheck("fails", t.F, "F must equal the cap")
    )
    z = zero(fam.cap.ground)
    v.axioms["ii"] = AxiomCheck("holds", note="O is the zero observer") if t.O == z else AxiomCheck("fails", t.O, "O must be zero")
    v.axioms["iii"] = AxiomCheck("holds", note="entrywise min stays below the cap")
    v.axioms["iv"] = AxiomCheck("holds", note="entrywise sup stays below the cap")
    return v


def require_valid(t: Topology, **kw) -> TopologyVerdict:
    v = validate_topology(t, **kw)
    if not v.valid:
        name, a = v.first_failure
        raise InvalidTopology(f"axiom {name} fails: {a.note}", v)
    return v


# ------------------------------------------------------- interior / openness


def _finite_opens(t: Topology):
    if t.is_family:
        raise Undecidable("operation needs a finite list of opens")
    return t.opens


def interior(h, t: Topology) -> list:
    """Sup-set of the opens lying below ``h``."""
    meet = t.meet
    below = [g for g in _finite_opens(t) if meet(g, h) == g]
    if not below:
        raise EmptyInteriorFamily("no open G satisfies G = G ^ H")
    return t.universe.sup_set(below)


@dataclass
class OpenVerdict:
    is_open: bool
    in_interior: bool
    interior: list

    def __bool__(self):
        return self.is_open


def is_open(h, t: Topology) -> OpenVerdict:
    """Membership in the opens, cross-checked against ``h in interior(h)``."""
    member = t.is_member(h)
    try:
        inside = interior(h, t)
    except EmptyInteriorFamily:
        inside = []
    in_int = h in inside
    if member != in_int:
        raise TheoremViolation(f"open={member} but in-interior={in_int} for {h!r}")
    return OpenVerdict(member, in_int, inside)


# ------------------------------------------------------------ closed systems


def complement_of(g, t: Topology):
    """The unique c with c^F = c, g v c = c v g = F and g ^ c = c ^ g = O."""
    if t.meet(g, t.F) != g:
        raise ValueError("complements are defined only for G with G = G ^ F")
    cands = t.universe.complements(g, t.F, t.O)
    if not cands:
        raise NoComplement(f"{g!r} has no complement relative to the stored O")
    if len(cands) > 1:
        raise NonUniqueComplement(f"{len(cands)} complements found", cands)
    return cands[0]


def is_closed(h, t: Topology) -> bool:
    return t.meet(h, t.F) == h and t.is_member(complement_of(h, t))


@dataclass
class ClosedMeetVerdict:
    hypothesis_1: bool  # (A ^ B) ^ A_F = O
    hypothesis_2: bool  # B v A_F v B_F = F
    meet_closed: bool | None = None
    complement_matches: bool | None = None

    @property
    def status(self) -> str:
        if not self.hypothesis_1:
            return "hypothesis 1 fails"
        if not self.hypothesis_2:
            return "hypothesis 2 fails"
        return "holds" if self.meet_closed and self.complement_matches else "conclusion fails"


def check_closed_meet(a, b, t: Topology) -> ClosedMeetVerdict:
    """Closed A, B with (A^B)^A_F = O and B v A_F v B_F = F give a closed A^B."""
    for x in (a, b):
        if not is_closed(x, t):
            raise ValueError(f"{x!r} is not closed")
    join, meet = t.join, t.meet
    ac, bc = complement_of(a, t), complement_of(b, t)
    ab = meet(a, b)
    v = ClosedMeetVerdict(
        hypothesis_1=meet(ab, ac) == t.O,
        hypothesis_2=join(join(b, ac), bc) == t.F,
    )
    if v.hypothesis_1 and v.hypothesis_2:
        try:
            abc = complement_of(ab, t)
        except (NoComplement, NonUniqueComplement):
            v.meet_closed, v.complement_matches = False, False
            return v
        v.meet_closed = t.is_member(abc)
        v.complement_matches = abc == join(ac, bc)
    return v


# --------------------------------------------------------------- continuity


@dataclass
class ContinuityVerdict:
    continuous: bool
    F_matches: bool
    failures: list = field(default_factory=list)
    homomorphism: str = ""

    def __bool__(self):
        return self.continuous


def check_continuous(f: PointMap, domain_top: Topology, codomain_top: Topology) -> ContinuityVerdict:
    """``f: Y -> X`` is continuous from ``domain_top`` (on Y) to ``codomain_top`` (on X).

    Checks ``F o f == G``, that every open pulls back to an open, and that
    pulling back commutes with join and meet on the codomain universe.
    """
    ux, uy = codomain_top.universe, domain_top.universe
    failures = []
    F_ok = pull_back(codomain_top.F, f) == domain_top.F
    if not F_ok:
        failures.append(("F o f != G", codomain_top.F))
    for h in _finite_opens(codomain_top):
        if not domain_top.is_member(pull_back(h, f)):
            failures.append(("open pulls back outside the opens", h))
    if getattr(ux, "finite", False):
        mode = "exhaustive over universe pairs"
        pairs = itertools.product(ux.elements, repeat=2)
        for h in ux.elements:
            if pull_back(h, f) not in uy:
                failures.append(("H o f not in the domain universe", h))
    else:
        if getattr(uy, "finite", False):
            vals = {v for e in uy.elements for v in e.values}
            d = 2
            while Fraction(1, d) in vals:
                d += 1
            witness = Observer.constant(codomain_top.F.ground, Fraction(1, d))
            failures.append(("H o f not in the finite domain universe", witness))
        mode = "entrywise operations commute with pull-back"
        pairs = itertools.product(codomain_top.opens, repeat=2)
    for h, k in pairs:
        hf, kf = pull_back(h, f), pull_back(k, f)
        if pull_back(ux.join(h, k), f) != uy.join(hf, kf):
            failures.append(("(H v K) o f != H o f v K o f", (h, k)))
            break
        if pull_back(ux.meet(h, k), f) != uy.meet(hf, kf):
            failures.append(("(H ^ K) o f != H o f ^ K o f", (h, k)))
            break
    return ContinuityVerdict(not failures, F_ok, failures, mode)


@dataclass
class CompositionVerdict:
    f_continuous: bool
    g_continuous: bool
    composite_continuous: bool

    @property
    def holds(self) -> bool:
        return not (self.f_continuous and self.g_continuous) or self.composite_continuous


def check_composition(f: PointMap, g: PointMap, top_x: Topology, top_y: Topology, top_z: Topology) -> CompositionVerdict:
    """``f: Y -> X`` and ``g: Z -> Y`` continuous imply ``f o g`` continuous."""
    return CompositionVerdict(
        bool(check_continuous(f, top_y, top_x)),
        bool(check_continuous(g, top_z, top_y)),
        bool(check_continuous(compose(f, g), top_z, top_x)),
    )


# ------------------------------------------------------ pull-backs, products


def pullback_space(f: PointMap, t: Topology, validate: bool = True) -> Topology:
    """Topology on f's source whose opens are the pulled-back opens."""
    uni = t.universe
    ground = GroundSet(f.source, t.F.ground.dims)
    if isinstance(uni, CompleteObserverSpace):
        new_uni = CompleteObserverSpace(ground, uni.free_dims)
    else:
        elems = list(dict.fromkeys(pull_back(e, f) for e in uni.elements))
        new_uni = AlgebraUniverse(elems, uni.join, uni.meet, uni.closure_mode, uni.encoder)
    if isinstance(t.opens, ScaleFamily):
        opens = ScaleFamily(pull_back(t.opens.base, f), t.opens.lo, t.opens.hi, t.opens.free_dims)
    elif isinstance(t.opens, DownSetFamily):
        opens = DownSetFamily(pull_back(t.opens.cap, f))
    else:
        opens = tuple(pull_back(h, f) for h in t.opens)
    out = Topology(new_uni, pull_back(t.F, f), opens, pull_back(t.O, f))
    if validate:
        require_valid(out)
    return out


def product_space(factors: Sequence[Topology], validate: bool = True) -> Topology:
    """Finite product with componentwise operations and product opens."""
    factors = list(factors)
    if not factors:
        raise ValueError("product needs at least one factor")
    dims = {f.F.ground.dims for f in factors if isinstance(f.F, Observer)}
    if len(dims) > 1:
        raise IncompatibleIndexSets(f"factors use different index sets: {sorted(dims)}")
    for f in factors:
        _finite_opens(f)
    uni = ProductUniverse([f.universe for f in factors])
    opens = tuple(ProductElement(p) for p in itertools.product(*(f.opens for f in factors)))
    t = Topology(
        uni,
        ProductElement(f.F for f in factors),
        opens,
        ProductElement(f.O for f in factors),
    )
    if validate:
        require_valid(t)
    return t
