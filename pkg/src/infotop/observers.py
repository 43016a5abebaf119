"""Multi-dimensional observers on a finite ground set and their algebras.

An :class:`Observer` is a dense table ``points x dims -> [0, 1]`` of exact
rationals.  Join and meet are the entrywise max and min.  The symbolic
families used for infinite topologies (:class:`ScaleFamily`,
:class:`DownSetFamily`) and the classical-topology embedding also live here.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .algebra import CLOSED, AlgebraUniverse
from .errors import (
    AmbiguousWitness,
    GroundMismatch,
    NotATopology,
    NotInUniverse,
    ScaleOutOfRange,
    Undecidable,
)
from .rational import ONE, ZERO, render, scalar, unit_scalar


@dataclass(frozen=True)
class GroundSet:
    points: tuple[str, ...]
    dims: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "dims", tuple(self.dims))
        if not self.points or not self.dims:
            raise ValueError("ground set needs at least one point and one dimension")
        if len(set(self.points)) != len(self.points):
            raise ValueError("point identifiers must be unique")
        if len(set(self.dims)) != len(self.dims):
            raise ValueError("dimension identifiers must be unique")

    @property
    def size(self) -> int:
        return len(self.points) * len(self.dims)

    def point_index(self, p: str) -> int:
        try:
            return self.points.index(p)
        except ValueError:
            raise KeyError(f"unknown point {p!r}") from None

    def dim_index(self, d: str) -> int:
        try:
            return self.dims.index(d)
        except ValueError:
            raise KeyError(f"unknown dimension {d!r}") from None

    def cell(self, p: str, d: str) -> int:
        return self.point_index(p) * len(self.dims) + self.dim_index(d)


def line_ground(points: Sequence[str], dim: str = "level") -> GroundSet:
    return GroundSet(tuple(points), (dim,))


class Observer:
    """Immutable table of rationals in [0, 1], row-major over (point, dim)."""

    __slots__ = ("ground", "values", "_hash")

    def __init__(self, ground: GroundSet, values: Iterable):
        vals = tuple(unit_scalar(v) for v in values)
        if len(vals) != ground.size:
            raise ValueError(f"expected {ground.size} entries, got {len(vals)}")
        self.ground = ground
        self.values = vals
        self._hash = None

    @classmethod
    def _raw(cls, ground, values):
        obj = cls.__new__(cls)
        obj.ground = ground
        obj.values = values
        obj._hash = None
        return obj

    @classmethod
    def from_rows(cls, ground: GroundSet, rows: Mapping[str, Sequence] | Sequence[Sequence]):
        if isinstance(rows, Mapping):
            missing = set(ground.points) - set(rows)
            extra = set(rows) - set(ground.points)
            if missing or extra:
                raise ValueError(f"rows must cover exactly the points (missing {sorted(missing)}, extra {sorted(extra)})")
            rows = [rows[p] for p in ground.points]
        flat = []
        for r in rows:
            r = list(r)
            if len(r) != len(ground.dims):
                raise ValueError(f"row {r!r} does not match {len(ground.dims)} dims")
            flat.extend(r)
        return cls(ground, flat)

    @classmethod
    def constant(cls, ground: GroundSet, c) -> "Observer":
        return cls(ground, [c] * ground.size)

    @classmethod
    def from_function(cls, ground: GroundSet, fn) -> "Observer":
        return cls(ground, [fn(p, d) for p in ground.points for d in ground.dims])

    def at(self, point: str, dim: str) -> Fraction:
        return self.values[self.ground.cell(point, dim)]

    def row(self, point: str) -> tuple:
        k = len(self.ground.dims)
        i = self.ground.point_index(point) * k
        return self.values[i : i + k]

    def cells(self) -> tuple:
        return self.values

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Observer):
            return NotImplemented
        return self.values == other.values and self.ground == other.ground

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ground, self.values))
        return self._hash

    def __le__(self, other):
        _same_ground(self, other)
        return all(x <= y for x, y in zip(self.values, other.values))

    def __repr__(self):
        k = len(self.ground.dims)
        rows = []
        for i, p in enumerate(self.ground.points):
            cells = ",".join(render(v) for v in self.values[i * k : (i + 1) * k])
            rows.append(f"{p}:{cells}")
        return "Observer(" + " ".join(rows) + ")"


def _same_ground(a: Observer, b: Observer):
    if a.ground is not b.ground and a.ground != b.ground:
        raise GroundMismatch("observers live on different ground sets")


def obs_join(a: Observer, b: Observer) -> Observer:
    _same_ground(a, b)
    return Observer._raw(a.ground, tuple(x if x >= y else y for x, y in zip(a.values, b.values)))


def obs_meet(a: Observer, b: Observer) -> Observer:
    _same_ground(a, b)
    return Observer._raw(a.ground, tuple(x if x <= y else y for x, y in zip(a.values, b.values)))


def obs_encode(a: Observer) -> tuple:
    return a.values


def obs_scale(r, a: Observer) -> Observer:
    r = scalar(r)
    if not ZERO <= r <= ONE:
        raise ScaleOutOfRange(f"scale {r} is outside [0, 1]")
    return Observer._raw(a.ground, tuple(r * v for v in a.values))


def zero(ground: GroundSet) -> Observer:
    return Observer._raw(ground, (ZERO,) * ground.size)


def one(ground: GroundSet) -> Observer:
    return Observer._raw(ground, (ONE,) * ground.size)


def free_cells(ground: GroundSet, free_dims: Iterable[str]) -> frozenset[int]:
    free = set(free_dims)
    unknown = free - set(ground.dims)
    if unknown:
        raise KeyError(f"unknown dimensions {sorted(unknown)}")
    k = len(ground.dims)
    return frozenset(i * k + j for i in range(len(ground.points)) for j, d in enumerate(ground.dims) if d in free)


def projective_ops(free_dims: Iterable[str]):
    """Join and meet that act entrywise on constrained dims and keep the left
    operand unchanged on ``free_dims``.

    The pair satisfies all five axioms, is not commutative when a free dim
    exists, and makes sup-sets non-singleton (every free entry is left open).
    """
    free_dims = frozenset(free_dims)
    cache: dict[GroundSet, frozenset[int]] = {}

    def mask(g):
        m = cache.get(g)
        if m is None:
            m = cache[g] = free_cells(g, free_dims)
        return m

    def join(a, b):
        _same_ground(a, b)
        m = mask(a.ground)
        return Observer._raw(
            a.ground,
            tuple(x if (i in m or x >= y) else y for i, (x, y) in enumerate(zip(a.values, b.values))),
        )

    def meet(a, b):
        _same_ground(a, b)
        m = mask(a.ground)
        return Observer._raw(
            a.ground,
            tuple(x if (i in m or x <= y) else y for i, (x, y) in enumerate(zip(a.values, b.values))),
        )

    join.free_dims = meet.free_dims = free_dims
    return join, meet


def observer_universe(elements: Iterable[Observer], closure_mode: str = CLOSED) -> AlgebraUniverse:
    """Finite universe of observers under entrywise max/min."""
    return AlgebraUniverse(elements, obs_join, obs_meet, closure_mode, encoder=obs_encode)


class CompleteObserverSpace:
    """Every observer on a ground set: the infinite ambient universe.

    With no free dims the supremum of any non-empty finite family is its
    entrywise max, and complements have a per-entry closed form.  With free
    dims the operations are :func:`projective_ops` and sup-sets are infinite,
    so only symbolic reasoning is available.
    """

    finite = False
    elements = None
    closure_mode = "open-world"

    def __init__(self, ground: GroundSet, free_dims: Iterable[str] = ()):
        self.ground = ground
        self.free_dims = frozenset(free_dims)
        free_cells(ground, self.free_dims)
        if self.free_dims:
            self.join, self.meet = projective_ops(self.free_dims)
            self.encoder = None
        else:
            self.join, self.meet = obs_join, obs_meet
            self.encoder = obs_encode

    @property
    def lub_is_cellwise(self) -> bool:
        return not self.free_dims

    def __contains__(self, x):
        return isinstance(x, Observer) and x.ground == self.ground

    def __repr__(self):
        return f"CompleteObserverSpace({len(self.ground.points)}x{len(self.ground.dims)})"

    def require(self, family):
        fam = list(family)
        for g in fam:
            if g not in self:
                raise NotInUniverse(f"{g!r} is not an observer on this ground set")
        return fam

    def sup_set(self, family) -> list:
        fam = self.require(family)
        if not fam:
            raise ValueError("sup_set needs a non-empty family")
        if self.free_dims:
            raise Undecidable("sup-sets over free dimensions are infinite; use family reasoning")
        acc = fam[0]
        for g in fam[1:]:
            acc = obs_join(acc, g)
        return [acc]

    def complements(self, g: Observer, top: Observer, bottom: Observer) -> list:
        if self.free_dims:
            raise Undecidable("complements over free dimensions are not enumerable")
        out = []
        for x, t, b in zip(g.values, top.values, bottom.values):
            if b > t:
                return []
            if x == t and x == b:
                out.append(t)
            elif x == t:
                out.append(b)
            elif x == b:
                out.append(t)
            else:
                return []
        return [Observer._raw(g.ground, tuple(out))]


@dataclass(frozen=True)
class ScaleFamily:
    """``{r * base | lo <= r <= hi}`` with ``free_dims`` left unconstrained."""

    base: Observer
    lo: Fraction = ZERO
    hi: Fraction = ONE
    free_dims: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "lo", scalar(self.lo))
        object.__setattr__(self, "hi", scalar(self.hi))
        object.__setattr__(self, "free_dims", frozenset(self.free_dims))
        if not ZERO <= self.lo <= self.hi <= ONE:
            raise ValueError(f"invalid scale range [{self.lo}, {self.hi}]")
        free_cells(self.base.ground, self.free_dims)

    @property
    def constrained(self) -> list[int]:
        m = free_cells(self.base.ground, self.free_dims)
        return [i for i in range(self.base.ground.size) if i not in m]

    def member(self, r, fill=None) -> Observer:
        """The family member at scale ``r``; free entries taken from ``fill``."""
        r = scalar(r)
        if not self.lo <= r <= self.hi:
            raise ScaleOutOfRange(f"scale {r} outside [{self.lo}, {self.hi}]")
        m = free_cells(self.base.ground, self.free_dims)
        fill_vals = fill.values if fill is not None else (ZERO,) * self.base.ground.size
        return Observer._raw(
            self.base.ground,
            tuple(fill_vals[i] if i in m else r * v for i, v in enumerate(self.base.values)),
        )


@dataclass(frozen=True)
class Membership:
    member: bool
    scale: Fraction | None
    reason: str = ""

    def __bool__(self):
        return self.member


def family_member(fam: ScaleFamily, candidate: Observer) -> Membership:
    """Decide ``candidate == r * base`` on constrained entries for some r in range."""
    _same_ground(fam.base, candidate)
    cells = fam.constrained
    pivot = next((i for i in cells if fam.base.values[i] != 0), None)
    if pivot is None:
        raise AmbiguousWitness("base vanishes on every constrained entry; any scale fits")
    r = candidate.values[pivot] / fam.base.values[pivot]
    for i in cells:
        if candidate.values[i] != r * fam.base.values[i]:
            return Membership(False, None, f"entry {i} is not {render(r)} times the base")
    if not fam.lo <= r <= fam.hi:
        return Membership(False, None, f"scale {render(r)} outside [{render(fam.lo)}, {render(fam.hi)}]")
    return Membership(True, r)


@dataclass(frozen=True)
class DownSetFamily:
    """Every observer lying entrywise below ``cap``."""

    cap: Observer

    def contains(self, candidate: Observer) -> bool:
        return candidate.ground == self.cap.ground and candidate <= self.cap


@dataclass
class ClassicalEmbedding:
    """A finite classical topology rendered as characteristic observers."""

    ground: GroundSet
    sets: tuple[frozenset, ...]
    chi: dict

    @property
    def observers(self) -> list[Observer]:
        return [self.chi[s] for s in self.sets]

    def char(self, subset) -> Observer:
        return characteristic(self.ground, subset)

    def universe(self) -> AlgebraUniverse:
        """Characteristic observers of every subset of the points."""
        pts = self.ground.points
        subsets = itertools.chain.from_iterable(itertools.combinations(pts, r) for r in range(len(pts) + 1))
        return observer_universe(characteristic(self.ground, s) for s in subsets)

    def topology(self):
        from .topology import Topology

        full = frozenset(self.ground.points)
        return Topology(
            universe=self.universe(),
            F=self.chi[full],
            opens=tuple(self.observers),
            O=self.chi[frozenset()],
        )


def characteristic(ground: GroundSet, subset) -> Observer:
    s = set(subset)
    unknown = s - set(ground.points)
    if unknown:
        raise KeyError(f"unknown points {sorted(unknown)}")
    k = len(ground.dims)
    return Observer._raw(ground, tuple(ONE if p in s else ZERO for p in ground.points for _ in range(k)))


def embed_classical(points: Sequence[str], opens: Iterable[Iterable[str]]) -> ClassicalEmbedding:
    """Validate a finite classical topology and embed it as characteristic observers."""
    ground = line_ground(points, "chi")
    full = frozenset(points)
    fam = []
    for u in opens:
        u = frozenset(u)
        if not u <= full:
            raise NotATopology(f"{sorted(u)} is not a subset of the points")
        if u not in fam:
            fam.append(u)
    members = set(fam)
    if frozenset() not in members:
        raise NotATopology("the empty set is missing", pair=(frozenset(), frozenset()))
    if full not in members:
        raise NotATopology("the full point set is missing", pair=(full, full))
    for u, v in itertools.combinations(fam, 2):
        if u | v not in members:
            raise NotATopology(f"union of {sorted(u)} and {sorted(v)} is missing", pair=(u, v))
        if u & v not in members:
            raise NotATopology(f"intersection of {sorted(u)} and {sorted(v)} is missing", pair=(u, v))
    order = {p: i for i, p in enumerate(points)}
    fam.sort(key=lambda s: (len(s), sorted(order[p] for p in s)))
    chi = {u: characteristic(ground, u) for u in fam}
    return ClassicalEmbedding(ground, tuple(fam), chi)
